#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "fmgbc/channel.hpp"
#include "fmgbc/solver_config.hpp"
#include "fmgbc/types.hpp"

namespace fmgbc {

/// Tall factor T of an input covariance K_U = T T^H. A zero-power input is
/// the dim x 0 factor (rank 0).
struct InputFactor {
    InputFactor() = default;
    explicit InputFactor(ComplexMatrix t_) : t(std::move(t_)) {}

    Eigen::Index rank() const { return t.cols(); }
    Eigen::Index dim() const { return t.rows(); }
    ComplexMatrix covariance() const { return t * t.adjoint(); }
    double power() const { return t.squaredNorm(); }  // tr(T T^H)

    ComplexMatrix t;  // dim x rank
};

/// Linear coefficient of the precoding auxiliary variable, rank x dim. Rows
/// match the rank of the first-encoded user's factor.
struct InflationFactor {
    InflationFactor() = default;
    explicit InflationFactor(ComplexMatrix b_) : b(std::move(b_)) {}

    static InflationFactor zero(Eigen::Index rank, Eigen::Index dim) {
        return InflationFactor(ComplexMatrix::Zero(rank, dim));
    }

    ComplexMatrix b;
};

/// Encoding order: which user's message is precoded against the other's
/// signal (that user is pi_1, the other is pi_2 and is encoded first).
enum class Order { dpc_user1, dpc_user2 };

inline Order flip(Order o) {
    return o == Order::dpc_user1 ? Order::dpc_user2 : Order::dpc_user1;
}
inline int order_tag(Order o) { return o == Order::dpc_user1 ? 12 : 21; }

enum class PointKind { swept, axis, time_share, closed_form };

/// One achievable (R1, R2) point in bits/channel use, clamped nonnegative,
/// indexed by absolute user (not encoding position).
struct RatePair {
    double r1 = 0.0;
    double r2 = 0.0;
    Order order = Order::dpc_user1;
    double alpha = 0.0;
    std::array<double, 2> std_err{0.0, 0.0};
    int iterations = 0;
    bool converged = true;
    PointKind kind = PointKind::swept;
};

/// Swept points plus their convexified Pareto frontier.
struct RegionBoundary {
    std::vector<RatePair> points;
    std::vector<RatePair> hull;  // ordered by increasing r1; axis endpoints included
    std::string provenance;
};

/// Indices of the concave-decreasing upper-right frontier, ordered by
/// increasing first coordinate. Dominated and interior points drop out; the
/// (max r1) and (max r2) extremes survive.
std::vector<std::size_t> upper_hull_indices(
    const std::vector<std::array<double, 2>>& pts);

std::vector<std::array<double, 2>> upper_hull(
    const std::vector<std::array<double, 2>>& pts);

/// log2 |M(h)| for the bordered matrix
///   M = [[I + b K2 b^H, (T1^H + b K2) h], [h^H (T1 + K2 b^H), 1 + h^H (K1 + K2) h]]
/// evaluated through the Schur complement of its top-left block.
double logdet2_bordered_m(const InputFactor& t1, const ComplexMatrix& k_u2,
                          const InflationFactor& b, const ComplexVector& h);

/// Monte Carlo rate machinery over two frozen sample batches (encoding-order
/// position 1 and 2). All expectations that share a user's channel reuse that
/// user's batch, so rate differences see common random numbers. Standard
/// errors come from 20 batch means.
class RateEvaluator {
public:
    RateEvaluator(ChannelSampleBatch pi1, ChannelSampleBatch pi2);

    struct PairEstimate {
        double raw1 = 0.0;  // unclamped, encoding-order position 1, bits
        double raw2 = 0.0;
        double se1 = 0.0;
        double se2 = 0.0;
    };

    /// Interference penalty term: E_2[log2(1 + h^H K1 h)] + E_1[log2 |M|].
    double delta(const InputFactor& t1, const InputFactor& t2,
                 const InflationFactor& b) const;

    /// Statistical-CSIT pair: raw_k = E_k[log2(1 + h^H (K1+K2) h)] - delta.
    PairEstimate statistical(const InputFactor& t1, const InputFactor& t2,
                             const InflationFactor& b) const;

    /// Covariance rule for the full-CSIT reference: maps the realization pair
    /// to that realization's input covariance.
    using CovRule =
        std::function<ComplexMatrix(const ComplexVector&, const ComplexVector&)>;

    /// Full-CSIT pair with the clamp inside the expectation; the per-channel
    /// optimum inflation factor is implicit (interference fully pre-canceled).
    PairEstimate full_csit(const CovRule& k1_rule, const CovRule& k2_rule) const;

    const ChannelSampleBatch& batch1() const { return pi1_; }
    const ChannelSampleBatch& batch2() const { return pi2_; }

private:
    ChannelSampleBatch pi1_, pi2_;
};

/// Spec-level wrapper of RateEvaluator::delta on explicit batches.
double delta_term(const InputFactor& t1, const ComplexMatrix& k_u2,
                  const InflationFactor& b, const ChannelSampleBatch& samples1,
                  const ChannelSampleBatch& samples2);

/// Builds a RatePair in absolute user indexing from an encoding-order
/// estimate (clamps, maps by order, combines per-stream errors).
RatePair make_rate_pair(const RateEvaluator::PairEstimate& est, Order order,
                        double alpha);

/// Statistical-CSIT rate pair on freshly drawn batches (seeds derived from
/// cfg.seed). t1/t2 are the factors of encoding positions 1 and 2 of `order`.
RatePair rate_pair_statistical(const InputFactor& t1, const InputFactor& t2,
                               const InflationFactor& b, Order order, double alpha,
                               const ChannelStatistics& stats_pi1,
                               const ChannelStatistics& stats_pi2,
                               const SolverConfig& cfg);

/// Full-CSIT rate pair on freshly drawn batches.
RatePair rate_pair_full_csit(const RateEvaluator::CovRule& k_u1_rule,
                             const RateEvaluator::CovRule& k_u2_rule, Order order,
                             double alpha, const ChannelStatistics& stats_pi1,
                             const ChannelStatistics& stats_pi2,
                             const SolverConfig& cfg);

}  // namespace fmgbc
