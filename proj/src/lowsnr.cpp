#include "fmgbc/lowsnr.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "delta_kernel.hpp"
#include "fmgbc/linalg.hpp"
#include "fmgbc/rng.hpp"

namespace fmgbc {

namespace {

constexpr double kLn2 = std::numbers::ln2;

std::optional<double> energy_from_slope(double slope, double scale) {
    // Positive-slope test uses the same band as the positivity verdict.
    if (slope > 1e-9 * (1.0 + scale)) return kLn2 / slope;
    return std::nullopt;
}

std::vector<RatePair> hull_of(const std::vector<RatePair>& pts) {
    std::vector<std::array<double, 2>> coords;
    for (const RatePair& p : pts) coords.push_back({p.r1, p.r2});
    std::vector<RatePair> hull;
    for (std::size_t i : upper_hull_indices(coords)) hull.push_back(pts[i]);
    if (!hull.empty() && hull.front().r1 > 0.0) {
        RatePair a = hull.front();
        a.r1 = 0.0;
        a.kind = PointKind::axis;
        hull.insert(hull.begin(), a);
    }
    if (!hull.empty() && hull.back().r2 > 0.0) {
        RatePair a = hull.back();
        a.r2 = 0.0;
        a.kind = PointKind::axis;
        hull.push_back(a);
    }
    return hull;
}

}  // namespace

RegionBoundary low_snr_region(const ComplexMatrix& k1, const ComplexMatrix& k2,
                              double p, const std::vector<double>& alpha_grid) {
    if (!(p > 0.0)) throw DimensionMismatch("power must be positive");
    if (k1.rows() != k2.rows())
        throw DimensionMismatch("covariance dimensions differ");
    const EigenPair l12 = trace_max_unit_rank(k1 - k2);
    const EigenPair l21 = trace_max_unit_rank(k2 - k1);
    RegionBoundary boundary;
    for (double alpha : alpha_grid) {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw DimensionMismatch("alpha grid value outside [0, 1]");
        RatePair pt;
        pt.kind = PointKind::closed_form;
        pt.alpha = alpha;
        pt.r1 = std::max(0.0, alpha * p * l12.value / kLn2);
        pt.r2 = std::max(0.0, (1.0 - alpha) * p * l21.value / kLn2);
        boundary.points.push_back(pt);
    }
    boundary.hull = hull_of(boundary.points);
    boundary.provenance = "low_snr";
    return boundary;
}

std::array<std::optional<double>, 2> min_bit_energy(const ComplexMatrix& k1,
                                                    const ComplexMatrix& k2) {
    const ComplexMatrix d12 = k1 - k2;
    const double scale = max_abs(d12);
    const double l12 = trace_max_unit_rank(d12).value;
    const double l21 = trace_max_unit_rank((-d12).eval()).value;
    return {energy_from_slope(l12, scale), energy_from_slope(l21, scale)};
}

LowSnrSummary energy_penalties(const ChannelStatistics& stats1,
                               const ChannelStatistics& stats2,
                               const SolverConfig& cfg) {
    LowSnrSummary summary;
    summary.rician_extension = stats1.rician() || stats2.rician();
    // Effective second moments coincide with the covariances for zero means,
    // so the Rician substitution is uniform.
    const ComplexMatrix m1 = effective_second_moment(stats1);
    const ComplexMatrix m2 = effective_second_moment(stats2);
    const ComplexMatrix d = m1 - m2;
    const EigenPair l12 = trace_max_unit_rank(d);
    const EigenPair l21 = trace_max_unit_rank((-d).eval());
    summary.lambda_max_12 = l12.value;
    summary.lambda_max_21 = l21.value;
    summary.direction1 = l12.vector;
    summary.direction2 = l21.vector;
    summary.verdict = low_snr_positivity(m1, m2);

    const double dscale = max_abs(d);
    summary.eb_secure_scsit = {energy_from_slope(l12.value, dscale),
                               energy_from_slope(l21.value, dscale)};
    summary.eb_nosecrecy = {
        energy_from_slope(trace_max_unit_rank(m1).value, max_abs(m1)),
        energy_from_slope(trace_max_unit_rank(m2).value, max_abs(m2))};
    for (int j = 0; j < 2; ++j) {
        if (summary.eb_secure_scsit[j] && summary.eb_nosecrecy[j])
            summary.secrecy_penalty[j] =
                *summary.eb_secure_scsit[j] - *summary.eb_nosecrecy[j];
        // Secure transmission can only cost more energy.
        if (summary.eb_secure_scsit[j] && summary.eb_nosecrecy[j])
            summary.secrecy_inequality_ok[j] =
                *summary.eb_secure_scsit[j] >=
                *summary.eb_nosecrecy[j] - 1e-12 * (1.0 + *summary.eb_nosecrecy[j]);
    }

    // Full-CSIT reference: ln2 / E[(lambda_max(h1 h1^H - h2 h2^H))^+].
    const ChannelSampleBatch s1 =
        sample(stats1, cfg.samples, derive_seed(cfg.seed, 11));
    const ChannelSampleBatch s2 =
        sample(stats2, cfg.samples, derive_seed(cfg.seed, 12));
    const Eigen::Index count = std::min(s1.count(), s2.count());
    RealVector v1(count), v2(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const ComplexVector h1 = s1.samples.col(i);
        const ComplexVector h2 = s2.samples.col(i);
        const ComplexMatrix diff = h1 * h1.adjoint() - h2 * h2.adjoint();
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(diff,
                                                        Eigen::EigenvaluesOnly);
        v1[i] = std::max(0.0, es.eigenvalues().maxCoeff());
        v2[i] = std::max(0.0, -es.eigenvalues().minCoeff());
    }
    const RealVector* streams[2] = {&v1, &v2};
    for (int j = 0; j < 2; ++j) {
        const double mean = streams[j]->mean();
        const double se = detail::batch_std_err(*streams[j]);
        if (mean > 0.0) {
            summary.eb_secure_fcsit[j] = kLn2 / mean;
            summary.eb_secure_fcsit_std_err[j] = kLn2 * se / (mean * mean);
        }
        if (summary.eb_secure_scsit[j] && summary.eb_secure_fcsit[j])
            summary.csit_inequality_ok[j] =
                *summary.eb_secure_scsit[j] >=
                *summary.eb_secure_fcsit[j] -
                    3.0 * summary.eb_secure_fcsit_std_err[j];
    }
    return summary;
}

}  // namespace fmgbc
