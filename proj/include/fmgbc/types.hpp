#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace fmgbc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Real eigenvalue of a Hermitian problem together with its unit eigenvector.
struct EigenPair {
    double value = 0.0;
    ComplexVector vector;
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};
struct NotHermitian : Error {
    using Error::Error;
};
struct NotPsd : Error {
    using Error::Error;
};
struct NotPd : Error {
    using Error::Error;
};
struct Singular : Error {
    using Error::Error;
};
// Per-sample bordered matrix numerically singular. The matrix dominates
// diag(I, 1), so this indicates corrupted inputs rather than bad luck.
struct SingularM : Error {
    using Error::Error;
};
// Mean coefficient matrix of the inflation-factor update not invertible.
struct SingularMean : Error {
    using Error::Error;
};
struct BothZero : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

/// Non-finite rates inside a region sweep; carries the offending grid cell.
struct SolverDiverged : Error {
    SolverDiverged(const std::string& what, double alpha_, int order_tag_)
        : Error(what), alpha(alpha_), order_tag(order_tag_) {}
    double alpha;
    int order_tag;  // 12 or 21
};

}  // namespace fmgbc
