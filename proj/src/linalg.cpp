#include "fmgbc/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace fmgbc {

double max_abs(const ComplexMatrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    if (a.size() == 0) return true;
    return max_abs(a - a.adjoint()) <= tol;
}

void require_hermitian(const ComplexMatrix& a, const char* label, double tol) {
    if (a.rows() != a.cols())
        throw DimensionMismatch(std::string(label) + " is not square");
    if (!is_hermitian(a, tol))
        throw NotHermitian(std::string(label) + " is not Hermitian within tolerance");
}

ComplexVector phase_fix(ComplexVector v) {
    Eigen::Index pivot = -1;
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double m = std::abs(v[i]);
        if (m > best) {  // first index wins ties
            best = m;
            pivot = i;
        }
    }
    if (pivot < 0 || best == 0.0) return v;
    const Complex phase = std::conj(v[pivot]) / best;
    return v * phase;
}

ComplexMatrix psd_factor(const ComplexMatrix& k, double rank_tol) {
    require_hermitian(k, "psd_factor input");
    const Eigen::Index n = k.rows();
    if (n == 0) return ComplexMatrix(0, 0);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(k);
    const RealVector& vals = es.eigenvalues();  // ascending
    const double lmax = std::max(vals[n - 1], 0.0);
    const double scale = std::max(lmax, max_abs(k));
    if (vals[0] < -rank_tol * scale)
        throw NotPsd("psd_factor input has a negative eigenvalue beyond tolerance");
    const double keep = rank_tol * lmax;
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = n - 1; i >= 0; --i)
        if (vals[i] > keep) cols.push_back(i);  // descending eigenvalue order
    ComplexMatrix t(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        t.col(static_cast<Eigen::Index>(j)) =
            phase_fix(es.eigenvectors().col(cols[j])) * std::sqrt(vals[cols[j]]);
    return t;
}

EigenPair max_generalized_eig(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_hermitian(a, "pencil first matrix");
    require_hermitian(b, "pencil second matrix");
    if (a.rows() != b.rows())
        throw DimensionMismatch("pencil matrices differ in dimension");
    const Eigen::Index n = a.rows();

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> esb(b);
    if (esb.eigenvalues()[0] <= 0.0)
        throw NotPd("pencil second matrix is not positive definite");
    Eigen::LLT<ComplexMatrix> llt(b);
    if (llt.info() != Eigen::Success)
        throw NotPd("pencil second matrix failed Cholesky");

    // W = L^-1 A L^-H, Hermitian; same spectrum as the pencil.
    ComplexMatrix w = llt.matrixL().solve(a);
    w = llt.matrixL().solve(w.adjoint()).adjoint();

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(w);
    const double lmax = es.eigenvalues()[n - 1];
    const double lmin = es.eigenvalues()[0];
    if (lmax - lmin <= 1e-12 * (1.0 + std::abs(lmax))) {
        // Flat quotient: every direction attains the value.
        ComplexVector e = ComplexVector::Zero(n);
        e[0] = 1.0;
        return {lmax, e};
    }
    ComplexVector e = llt.matrixU().solve(es.eigenvectors().col(n - 1));
    e.normalize();
    return {lmax, phase_fix(std::move(e))};
}

EigenPair trace_max_unit_rank(const ComplexMatrix& a) {
    require_hermitian(a, "trace_max_unit_rank input");
    if (a.rows() == 0) throw DimensionMismatch("trace_max_unit_rank input is empty");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
    const Eigen::Index n = a.rows();
    return {es.eigenvalues()[n - 1], phase_fix(es.eigenvectors().col(n - 1))};
}

double bordered_det(const ComplexMatrix& topleft, const ComplexVector& col,
                    double corner) {
    if (topleft.rows() != topleft.cols())
        throw DimensionMismatch("bordered_det top-left block is not square");
    if (col.size() != topleft.rows())
        throw DimensionMismatch("bordered_det column length mismatch");
    if (topleft.rows() == 0) return corner;
    Eigen::LLT<ComplexMatrix> llt(topleft);
    if (llt.info() != Eigen::Success)
        throw Singular("bordered_det top-left block is not invertible");
    double det_tl = 1.0;
    for (Eigen::Index i = 0; i < topleft.rows(); ++i) {
        const double d = llt.matrixL()(i, i).real();
        det_tl *= d * d;
    }
    const double schur = corner - std::real(col.dot(llt.solve(col)));
    return det_tl * schur;
}

}  // namespace fmgbc
