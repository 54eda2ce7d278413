#pragma once

#include <utility>
#include <vector>

#include "fmgbc/rates.hpp"
#include "fmgbc/solver_config.hpp"

namespace fmgbc {

struct TraceRecord {
    int iteration = 0;
    ComplexMatrix b;
    ComplexMatrix t1;
    ComplexMatrix t2;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double r1 = 0.0;  // encoding-position rates, clamped, bits
    double r2 = 0.0;
};

struct SolverTrace {
    std::vector<TraceRecord> records;
    bool converged = false;
    int iterations = 0;
};

/// Expectation-valued stationarity maps of the two power-constrained
/// subproblems. f1 reproduces the inflation-factor fixed-point map; g1, g2
/// are the (bits-scaled) conjugate gradients of the unclamped rates with
/// respect to T1 and T2.
struct KktMaps {
    ComplexMatrix f1;  // rank1 x dim
    ComplexMatrix g1;  // dim x rank1
    ComplexMatrix g2;  // dim x rank2
};

KktMaps kkt_maps(const InflationFactor& b, const InputFactor& t1,
                 const InputFactor& t2, const ChannelSampleBatch& samples1,
                 const ChannelSampleBatch& samples2);

/// One application of the inflation-factor map
///   f1(b) = -(E[A1^H])^-1 E[A2^H h^H],   [A1; A2] = M^-1 [I; 0]
/// over the position-1 batch. Throws SingularMean when E[A1^H] is singular.
ComplexMatrix inflation_map(const InflationFactor& b, const InputFactor& t1,
                            const InputFactor& t2,
                            const ChannelSampleBatch& samples1);

/// Fixed-point iteration for b from the b = 0 start, stopping when both
/// rates move less than cfg.delta between successive iterates (or at
/// cfg.max_inner). A zero-power position-2 input needs no pre-cancelation
/// and returns b = 0 immediately.
std::pair<InflationFactor, SolverTrace> inflation_fixed_point(
    const InputFactor& t1, const InputFactor& t2, const RateEvaluator& eval,
    const SolverConfig& cfg);

std::pair<InflationFactor, SolverTrace> inflation_fixed_point(
    const InputFactor& t1, const InputFactor& t2, const ChannelStatistics& pi1,
    const ChannelStatistics& pi2, const SolverConfig& cfg);

struct KktResult {
    InputFactor t1;
    InputFactor t2;
    InflationFactor b;
    SolverTrace trace;
};

/// Alternating optimizer: inner fixed point for b, then damped normalized
/// gradient iterations for T1 and T2 (Lagrange multipliers from the
/// Frobenius-norm ratio), outer stop on rate change <= cfg.delta. All
/// expectations reuse one frozen batch per user for the whole solve, so each
/// outer step is a deterministic map. Interior alpha only; the corners belong
/// to the beamformer construction.
KktResult kkt_alternating_optimize(const ChannelStatistics& pi1,
                                   const ChannelStatistics& pi2, double alpha,
                                   double p_t, const SolverConfig& cfg);

struct WeightedResult {
    RatePair best;       // absolute user indexing, order = dpc_user1
    double alpha = 0.0;  // power share of the precoded user at the optimum
    SolverTrace trace;
    double objective = 0.0;
};

/// Maximizes R_1 + mu R_2 (encoding-order rates of the given statistics
/// pair) by an alpha line search around the alternating optimizer; corner
/// alphas are evaluated with the closed-form beamformers. mu is capped at 1e6.
WeightedResult weighted_boundary(const ChannelStatistics& pi1,
                                 const ChannelStatistics& pi2, double p_t,
                                 double mu_weight, const SolverConfig& cfg);

}  // namespace fmgbc
