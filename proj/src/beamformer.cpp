#include "fmgbc/beamformer.hpp"

#include <cmath>

#include "fmgbc/linalg.hpp"

namespace fmgbc {

EigenPair select_e1(const ChannelStatistics& pi1, const ChannelStatistics& pi2,
                    double alpha, double p_t) {
    if (alpha < 0.0 || alpha > 1.0)
        throw DimensionMismatch("alpha outside [0, 1]");
    if (!(p_t > 0.0)) throw DimensionMismatch("p_t must be positive");
    const Eigen::Index n = pi1.dim();
    const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
    const ComplexMatrix a = eye + alpha * p_t * effective_second_moment(pi1);
    const ComplexMatrix b = eye + alpha * p_t * effective_second_moment(pi2);
    return max_generalized_eig(a, b);
}

EigenPair select_e2(const ChannelStatistics& pi1, const ChannelStatistics& pi2,
                    double alpha, double p_t, const ComplexVector& e1) {
    const Eigen::Index n = pi1.dim();
    if (e1.size() != n) throw DimensionMismatch("e1 dimension mismatch");
    const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
    const ComplexMatrix r1 = effective_second_moment(pi1);
    const ComplexMatrix r2 = effective_second_moment(pi2);
    const double load1 = 1.0 + alpha * p_t * std::real(e1.dot(r1 * e1));
    const double load2 = 1.0 + alpha * p_t * std::real(e1.dot(r2 * e1));
    const ComplexMatrix a = eye + ((1.0 - alpha) * p_t / load2) * r2;
    const ComplexMatrix b = eye + ((1.0 - alpha) * p_t / load1) * r1;
    return max_generalized_eig(a, b);
}

BeamformerSelection select_beamformers(const ChannelStatistics& pi1,
                                       const ChannelStatistics& pi2, double alpha,
                                       double p_t) {
    BeamformerSelection sel;
    sel.alpha = alpha;
    sel.e1 = select_e1(pi1, pi2, alpha, p_t);
    sel.e2 = select_e2(pi1, pi2, alpha, p_t, sel.e1.vector);
    return sel;
}

std::pair<InputFactor, InputFactor> build_unit_rank_inputs(
    const BeamformerSelection& sel, double p_t) {
    const Eigen::Index n = sel.e1.vector.size();
    const auto column = [n](const ComplexVector& e, double power) {
        if (power <= 0.0) return InputFactor(ComplexMatrix(n, 0));
        return InputFactor(std::sqrt(power) * (e / e.norm()));
    };
    return {column(sel.e1.vector, sel.alpha * p_t),
            column(sel.e2.vector, (1.0 - sel.alpha) * p_t)};
}

}  // namespace fmgbc
