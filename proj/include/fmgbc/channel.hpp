#pragma once

#include <cstdint>

#include "fmgbc/types.hpp"

namespace fmgbc {

/// Mean vector and covariance of one user's fading channel. Zero mean gives
/// Rayleigh fading, a nonzero mean the Rician line-of-sight component.
struct ChannelStatistics {
    ChannelStatistics(ComplexVector mean_, ComplexMatrix cov_);

    Eigen::Index dim() const { return mean.size(); }
    bool rician() const { return mean.norm() > 0.0; }

    ComplexVector mean;
    ComplexMatrix cov;
};

/// Batch of i.i.d. channel draws, one per column.
struct ChannelSampleBatch {
    ComplexMatrix samples;  // dim x count
    std::uint64_t seed = 0;

    Eigen::Index count() const { return samples.cols(); }
    Eigen::Index dim() const { return samples.rows(); }
};

/// Draws `count` i.i.d. realizations h = mu + K^{1/2} psi, psi ~ CN(0, I).
/// Each sample is derived from (seed, sample index) alone, so the batch is
/// bitwise identical no matter how the work is chunked across threads.
ChannelSampleBatch sample(const ChannelStatistics& stats, Eigen::Index count,
                          std::uint64_t seed);

/// E[H H^H] = K + mu mu^H.
ComplexMatrix effective_second_moment(const ChannelStatistics& stats);

struct ScaledDecision {
    bool scaled = false;
    double ratio = 0.0;  // c with k1 ~ c * k2 when scaled
};

/// Tests whether k1 = c * k2 with c estimated from the trace ratio:
/// scaled iff ||k1 - c k2||_max <= tol * ||k1||_max.
ScaledDecision is_scaled_pair(const ComplexMatrix& k1, const ComplexMatrix& k2,
                              double tol = 1e-9);

enum class PositivityVerdict { both_positive, only_user1, only_user2, neither };

/// Classifies k1 - k2: indefinite means both users can reach positive rates
/// in the vanishing-power limit; a one-sided difference degrades the channel
/// pair to a wiretap setup; equal matrices give neither.
PositivityVerdict low_snr_positivity(const ComplexMatrix& k1,
                                     const ComplexMatrix& k2);

const char* to_string(PositivityVerdict v);

}  // namespace fmgbc
