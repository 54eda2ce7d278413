#pragma once

#include <Eigen/Cholesky>
#include <cmath>

#include "fmgbc/rates.hpp"

namespace fmgbc::detail {

// Per-sample real quadratic forms h_i^H M h_i over the columns of `batch`.
inline RealVector quad_forms(const ComplexMatrix& m, const ComplexMatrix& batch) {
    if (m.size() == 0 || batch.rows() == 0)
        return RealVector::Zero(batch.cols());
    const ComplexMatrix p = m * batch;
    return batch.conjugate().cwiseProduct(p).colwise().sum().real().transpose();
}

inline double mean_of(const RealVector& v) {
    return v.size() == 0 ? 0.0 : v.mean();
}

// Standard error by contiguous batch means (distribution-free).
inline double batch_std_err(const RealVector& v, int batches = 20) {
    const Eigen::Index n = v.size();
    if (n < 2) return 0.0;
    const int b = static_cast<int>(std::min<Eigen::Index>(batches, n));
    const Eigen::Index base = n / b;
    Eigen::Index pos = 0;
    RealVector means(b);
    for (int k = 0; k < b; ++k) {
        const Eigen::Index len = base + (k < n % b ? 1 : 0);
        means[k] = v.segment(pos, len).mean();
        pos += len;
    }
    const double mu = means.mean();
    const double var = (means.array() - mu).square().sum() / (b - 1);
    return std::sqrt(var / b);
}

// Evaluates the bordered matrix M(h) through the Schur complement of its
// constant top-left block TL = I + b K2 b^H (factored once per kernel).
// The structure guarantees TL >= I and a Schur complement >= 1.
class BorderedKernel {
public:
    BorderedKernel(const InputFactor& t1, const ComplexMatrix& k_u2,
                   const InflationFactor& b) {
        const Eigen::Index n = t1.dim();
        const Eigen::Index rank = t1.rank();
        if (b.b.rows() != rank || b.b.cols() != n)
            throw DimensionMismatch("inflation factor shape does not match input factor");
        if (k_u2.rows() != n || k_u2.cols() != n)
            throw DimensionMismatch("second input covariance dimension mismatch");
        k12_ = t1.covariance() + k_u2;
        proj_ = t1.t.adjoint() + b.b * k_u2;
        ComplexMatrix tl = ComplexMatrix::Identity(rank, rank) + b.b * k_u2 * b.b.adjoint();
        tl = 0.5 * (tl + tl.adjoint().eval());
        llt_.compute(tl);
        if (rank > 0 && llt_.info() != Eigen::Success)
            throw SingularM("bordered top-left block failed factorization");
        logdet2_tl_ = 0.0;
        for (Eigen::Index i = 0; i < rank; ++i) {
            const double d = llt_.matrixL()(i, i).real();
            logdet2_tl_ += 2.0 * std::log2(d);
        }
    }

    Eigen::Index rank() const { return proj_.rows(); }

    // log2 |M(h_i)| for each column of `batch`.
    RealVector logdet2(const ComplexMatrix& batch) const {
        const RealVector corner =
            RealVector::Ones(batch.cols()) + quad_forms(k12_, batch);
        if (rank() == 0)
            return corner.array().log2() + logdet2_tl_;
        const ComplexMatrix c = proj_ * batch;
        const ComplexMatrix w = llt_.solve(c);
        const RealVector cw =
            c.conjugate().cwiseProduct(w).colwise().sum().real().transpose();
        RealVector out(batch.cols());
        for (Eigen::Index i = 0; i < batch.cols(); ++i) {
            const double s = corner[i] - cw[i];
            if (!(s > 1e-12))
                throw SingularM("bordered matrix numerically singular");
            out[i] = logdet2_tl_ + std::log2(s);
        }
        return out;
    }

    // Shared per-sample intermediates for the stationarity maps.
    struct Workspace {
        ComplexMatrix w;     // rank x count, TL^-1 (T1^H + b K2) h
        RealVector inv_s;    // 1 / Schur complement per sample
    };

    Workspace workspace(const ComplexMatrix& batch) const {
        Workspace ws;
        const RealVector corner =
            RealVector::Ones(batch.cols()) + quad_forms(k12_, batch);
        ws.inv_s.resize(batch.cols());
        if (rank() == 0) {
            ws.w.resize(0, batch.cols());
            for (Eigen::Index i = 0; i < batch.cols(); ++i)
                ws.inv_s[i] = 1.0 / corner[i];
            return ws;
        }
        const ComplexMatrix c = proj_ * batch;
        ws.w = llt_.solve(c);
        const RealVector cw =
            c.conjugate().cwiseProduct(ws.w).colwise().sum().real().transpose();
        for (Eigen::Index i = 0; i < batch.cols(); ++i) {
            const double s = corner[i] - cw[i];
            if (!(s > 1e-12))
                throw SingularM("bordered matrix numerically singular");
            ws.inv_s[i] = 1.0 / s;
        }
        return ws;
    }

    ComplexMatrix tl_inverse() const {
        const Eigen::Index r = rank();
        if (r == 0) return ComplexMatrix(0, 0);
        return llt_.solve(ComplexMatrix::Identity(r, r));
    }

    const ComplexMatrix& k12() const { return k12_; }

private:
    ComplexMatrix k12_;   // K1 + K2
    ComplexMatrix proj_;  // T1^H + b K2
    Eigen::LLT<ComplexMatrix> llt_;
    double logdet2_tl_ = 0.0;
};

}  // namespace fmgbc::detail
