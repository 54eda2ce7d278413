#include "fmgbc/channel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "fmgbc/linalg.hpp"
#include "fmgbc/rng.hpp"

namespace fmgbc {

ChannelStatistics::ChannelStatistics(ComplexVector mean_, ComplexMatrix cov_)
    : mean(std::move(mean_)), cov(std::move(cov_)) {
    require_hermitian(cov, "channel covariance");
    if (mean.size() != cov.rows())
        throw DimensionMismatch("channel mean length does not match covariance");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(cov,
                                                    Eigen::EigenvaluesOnly);
    if (cov.rows() > 0) {
        const double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
        const double scale = std::max(lmax, max_abs(cov));
        if (es.eigenvalues().minCoeff() < -kRankTol * scale)
            throw NotPsd("channel covariance is not positive semidefinite");
    }
}

namespace {

// PSD principal square root; handles singular covariances uniformly.
ComplexMatrix psd_sqrt(const ComplexMatrix& k) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(k);
    RealVector vals = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
}

}  // namespace

ChannelSampleBatch sample(const ChannelStatistics& stats, Eigen::Index count,
                          std::uint64_t seed) {
    if (count < 1) throw DimensionMismatch("sample count must be at least 1");
    const Eigen::Index n = stats.dim();
    const ComplexMatrix root = psd_sqrt(stats.cov);
    ChannelSampleBatch batch;
    batch.seed = seed;
    batch.samples.resize(n, count);
    ComplexVector psi(n);
    for (Eigen::Index i = 0; i < count; ++i) {
        NormalStream gen(derive_seed(seed, static_cast<std::uint64_t>(i)));
        for (Eigen::Index j = 0; j < n; ++j) psi[j] = gen.next_complex();
        batch.samples.col(i) = stats.mean + root * psi;
    }
    return batch;
}

ComplexMatrix effective_second_moment(const ChannelStatistics& stats) {
    return stats.cov + stats.mean * stats.mean.adjoint();
}

ScaledDecision is_scaled_pair(const ComplexMatrix& k1, const ComplexMatrix& k2,
                              double tol) {
    require_hermitian(k1, "is_scaled_pair first matrix");
    require_hermitian(k2, "is_scaled_pair second matrix");
    if (k1.rows() != k2.rows())
        throw DimensionMismatch("is_scaled_pair matrices differ in dimension");
    const double t1 = k1.trace().real();
    const double t2 = k2.trace().real();
    if (t1 == 0.0 && t2 == 0.0) throw BothZero("both matrices are zero");
    if (t2 == 0.0 || t1 == 0.0) return {false, 0.0};
    const double c = t1 / t2;
    const bool scaled = max_abs(k1 - c * k2) <= tol * max_abs(k1);
    return {scaled, scaled ? c : 0.0};
}

PositivityVerdict low_snr_positivity(const ComplexMatrix& k1,
                                     const ComplexMatrix& k2) {
    if (k1.rows() != k2.rows() || k1.cols() != k2.cols())
        throw DimensionMismatch("low_snr_positivity matrices differ in dimension");
    const ComplexMatrix d = k1 - k2;
    require_hermitian(d, "low_snr_positivity difference");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(d, Eigen::EigenvaluesOnly);
    const double thr = 1e-9 * (1.0 + max_abs(d));
    const bool has_pos = es.eigenvalues().maxCoeff() > thr;
    const bool has_neg = es.eigenvalues().minCoeff() < -thr;
    if (has_pos && has_neg) return PositivityVerdict::both_positive;
    if (has_pos) return PositivityVerdict::only_user1;
    if (has_neg) return PositivityVerdict::only_user2;
    return PositivityVerdict::neither;
}

const char* to_string(PositivityVerdict v) {
    switch (v) {
        case PositivityVerdict::both_positive: return "both_positive";
        case PositivityVerdict::only_user1: return "only_user1";
        case PositivityVerdict::only_user2: return "only_user2";
        case PositivityVerdict::neither: return "neither";
    }
    return "unknown";
}

}  // namespace fmgbc
