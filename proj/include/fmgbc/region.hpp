#pragma once

#include <vector>

#include "fmgbc/channel.hpp"
#include "fmgbc/rates.hpp"
#include "fmgbc/solver_config.hpp"

namespace fmgbc {

enum class SolverStrategy { beamformer_fixedpoint, kkt };

/// Sweeps the alpha grid for both encoding orders with the chosen solver and
/// returns all points plus their convexified frontier (axis endpoints
/// appended). Grid cells run concurrently on seeds derived from
/// (cfg.seed, cell index); the output order is the deterministic grid order.
/// Throws SolverDiverged when a cell produces non-finite rates.
RegionBoundary region_sweep(const ChannelStatistics& stats1,
                            const ChannelStatistics& stats2, double p_t,
                            const std::vector<double>& alpha_grid,
                            SolverStrategy strategy, const SolverConfig& cfg);

/// Full-CSIT reference region over the same grid, both orders. Inputs follow
/// the closed-form beamformer selection per alpha, held fixed across
/// realizations; the per-realization clamp sits inside the expectation.
RegionBoundary full_csit_region(const ChannelStatistics& stats1,
                                const ChannelStatistics& stats2, double p_t,
                                const std::vector<double>& alpha_grid,
                                const SolverConfig& cfg);

struct TimeSharingGrid {
    int tau_steps = 21;
    int power_steps = 21;
};

/// Baseline that alternates single-user wiretap transmissions: fraction tau
/// at power P_a for user 1 and 1-tau at P_b for user 2, with
/// tau P_a + (1-tau) P_b = P_T. Each fraction uses the full-power wiretap
/// beamformer of the active user.
RegionBoundary time_sharing_region(const ChannelStatistics& stats1,
                                   const ChannelStatistics& stats2, double p_t,
                                   const TimeSharingGrid& grid,
                                   const SolverConfig& cfg);

/// Frontier height at abscissa r1 (linear interpolation between hull
/// vertices, zero beyond the last one).
double hull_value(const std::vector<RatePair>& hull, double r1);

/// True when `outer` dominates `inner` pointwise within `slack` on a probe
/// grid spanning the inner frontier.
bool hull_encloses(const std::vector<RatePair>& outer,
                   const std::vector<RatePair>& inner, double slack,
                   int probes = 41);

/// Largest per-point combined standard error among hull vertices.
double max_hull_std_err(const std::vector<RatePair>& hull);

}  // namespace fmgbc
