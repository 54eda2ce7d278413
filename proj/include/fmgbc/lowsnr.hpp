#pragma once

#include <array>
#include <optional>

#include "fmgbc/channel.hpp"
#include "fmgbc/rates.hpp"
#include "fmgbc/solver_config.hpp"

namespace fmgbc {

/// Minimum-bit-energy quantities (linear scale). An empty optional marks an
/// unreachable value (nonpositive rate slope); no float sentinel enters the
/// math paths.
struct LowSnrSummary {
    double lambda_max_12 = 0.0;  // lambda_max(K1 - K2)
    double lambda_max_21 = 0.0;  // lambda_max(K2 - K1)
    ComplexVector direction1;
    ComplexVector direction2;
    std::array<std::optional<double>, 2> eb_secure_scsit;
    std::array<std::optional<double>, 2> eb_nosecrecy;
    std::array<std::optional<double>, 2> eb_secure_fcsit;  // Monte Carlo
    std::array<double, 2> eb_secure_fcsit_std_err{0.0, 0.0};
    std::array<std::optional<double>, 2> secrecy_penalty;
    std::array<bool, 2> secrecy_inequality_ok{true, true};
    std::array<bool, 2> csit_inequality_ok{true, true};
    PositivityVerdict verdict = PositivityVerdict::neither;
    bool rician_extension = false;  // effective second moments substituted
};

/// Closed-form vanishing-power region: R1 = (alpha p lambda_max(k1-k2)/ln 2)^+
/// and symmetrically for R2, over the alpha grid. Holds for zero-mean fading;
/// Rician callers substitute effective second moments.
RegionBoundary low_snr_region(const ComplexMatrix& k1, const ComplexMatrix& k2,
                              double p, const std::vector<double>& alpha_grid);

/// (ln 2 / lambda_max(k1-k2), ln 2 / lambda_max(k2-k1)); empty when the
/// eigenvalue is not positive.
std::array<std::optional<double>, 2> min_bit_energy(const ComplexMatrix& k1,
                                                    const ComplexMatrix& k2);

/// Secrecy and CSIT energy penalties: closed forms plus the Monte Carlo
/// full-CSIT reference ln 2 / E[(lambda_max(h1 h1^H - h2 h2^H))^+]. Rician
/// statistics switch the closed forms to effective second moments and set
/// the extension flag.
LowSnrSummary energy_penalties(const ChannelStatistics& stats1,
                               const ChannelStatistics& stats2,
                               const SolverConfig& cfg);

}  // namespace fmgbc
