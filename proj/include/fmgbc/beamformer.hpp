#pragma once

#include "fmgbc/channel.hpp"
#include "fmgbc/rates.hpp"
#include "fmgbc/types.hpp"

namespace fmgbc {

/// Unit-rank transmit directions for both encoding positions at a given
/// power split.
struct BeamformerSelection {
    EigenPair e1;  // direction of the precoded (position-1) user
    EigenPair e2;
    double alpha = 0.0;
};

/// Direction for position 1: largest generalized eigenpair of
/// (I + alpha P R_1, I + alpha P R_2) with R_j = K_j + mu_j mu_j^H.
EigenPair select_e1(const ChannelStatistics& pi1, const ChannelStatistics& pi2,
                    double alpha, double p_t);

/// Direction for position 2, given e1: the pencil matrices carry the scalar
/// loading 1 + alpha P e1^H R_j e1 of the already-placed first beam.
EigenPair select_e2(const ChannelStatistics& pi1, const ChannelStatistics& pi2,
                    double alpha, double p_t, const ComplexVector& e1);

BeamformerSelection select_beamformers(const ChannelStatistics& pi1,
                                       const ChannelStatistics& pi2, double alpha,
                                       double p_t);

/// T1 = sqrt(alpha P) e1, T2 = sqrt((1-alpha) P) e2; a zero share yields the
/// empty rank-0 factor. Traces hit the budgets exactly.
std::pair<InputFactor, InputFactor> build_unit_rank_inputs(
    const BeamformerSelection& sel, double p_t);

}  // namespace fmgbc
