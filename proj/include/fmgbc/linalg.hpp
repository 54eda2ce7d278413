#pragma once

#include "fmgbc/types.hpp"

namespace fmgbc {

inline constexpr double kHermitianTol = 1e-10;  // absolute, ||A - A^H||_max
inline constexpr double kRankTol = 1e-10;       // relative to lambda_max

double max_abs(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol);

/// Throws NotHermitian naming `label` when `a` fails the tolerance check.
void require_hermitian(const ComplexMatrix& a, const char* label,
                       double tol = kHermitianTol);

/// Multiplies by a unit phase so the entry of largest magnitude (first such
/// entry on ties) is real and positive. Zero vectors pass through.
ComplexVector phase_fix(ComplexVector v);

/// Factors a PSD matrix as K = T T^H with T of full column rank.
/// Columns correspond to eigenvalues above rank_tol * lambda_max(K), ordered
/// by decreasing eigenvalue. K = 0 yields a dim x 0 factor.
ComplexMatrix psd_factor(const ComplexMatrix& k, double rank_tol = kRankTol);

/// Largest-Rayleigh-quotient pair of the Hermitian pencil (A, B), B > 0:
/// maximizes e^H A e / e^H B e over unit vectors. Solved by the congruence
/// B = L L^H followed by an ordinary Hermitian eigenproblem of L^-1 A L^-H.
/// A flat quotient (A proportional to B) returns the first basis vector.
EigenPair max_generalized_eig(const ComplexMatrix& a, const ComplexMatrix& b);

/// Largest eigenpair of a Hermitian matrix (indefinite allowed). The returned
/// value equals max tr(A M) over PSD M with tr(M) <= 1, attained at M = e e^H.
/// On a degenerate leading eigenvalue any vector of the eigenspace is equally
/// optimal; the solver's deterministic choice is returned.
EigenPair trace_max_unit_rank(const ComplexMatrix& a);

/// det [[topleft, col], [col^H, corner]] via the Schur complement of the
/// positive definite top-left block. corner is the real bottom-right scalar.
double bordered_det(const ComplexMatrix& topleft, const ComplexVector& col,
                    double corner);

}  // namespace fmgbc
