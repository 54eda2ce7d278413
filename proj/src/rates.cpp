#include "fmgbc/rates.hpp"

#include <algorithm>
#include <cmath>

#include "delta_kernel.hpp"
#include "fmgbc/rng.hpp"

namespace fmgbc {

using detail::batch_std_err;
using detail::BorderedKernel;
using detail::quad_forms;

std::vector<std::size_t> upper_hull_indices(
    const std::vector<std::array<double, 2>>& pts) {
    std::vector<std::size_t> order;
    order.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!std::isfinite(pts[i][0]) || !std::isfinite(pts[i][1]))
            throw DimensionMismatch("upper_hull point is not finite");
        order.push_back(i);
    }
    if (order.empty()) return order;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a][0] != pts[b][0]) return pts[a][0] < pts[b][0];
        return pts[a][1] > pts[b][1];
    });
    // Drop duplicates and lower points at equal abscissa.
    std::vector<std::size_t> uniq;
    for (std::size_t idx : order) {
        if (!uniq.empty() && pts[uniq.back()][0] == pts[idx][0]) continue;
        uniq.push_back(idx);
    }
    const auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) -
               (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0]);
    };
    // Upper chain left to right; collinear middles removed.
    std::vector<std::size_t> chain;
    for (std::size_t idx : uniq) {
        while (chain.size() >= 2 &&
               cross(chain[chain.size() - 2], chain.back(), idx) >= 0.0)
            chain.pop_back();
        chain.push_back(idx);
    }
    // Keep the decreasing run from the peak: everything before it is dominated.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < chain.size(); ++i)
        if (pts[chain[i]][1] > pts[chain[peak]][1]) peak = i;
    return {chain.begin() + static_cast<std::ptrdiff_t>(peak), chain.end()};
}

std::vector<std::array<double, 2>> upper_hull(
    const std::vector<std::array<double, 2>>& pts) {
    std::vector<std::array<double, 2>> out;
    for (std::size_t i : upper_hull_indices(pts)) out.push_back(pts[i]);
    return out;
}

double logdet2_bordered_m(const InputFactor& t1, const ComplexMatrix& k_u2,
                          const InflationFactor& b, const ComplexVector& h) {
    BorderedKernel kernel(t1, k_u2, b);
    return kernel.logdet2(h)(0);
}

RateEvaluator::RateEvaluator(ChannelSampleBatch pi1, ChannelSampleBatch pi2)
    : pi1_(std::move(pi1)), pi2_(std::move(pi2)) {
    if (pi1_.dim() != pi2_.dim())
        throw DimensionMismatch("sample batches differ in channel dimension");
}

double RateEvaluator::delta(const InputFactor& t1, const InputFactor& t2,
                            const InflationFactor& b) const {
    return delta_term(t1, t2.covariance(), b, pi1_, pi2_);
}

double delta_term(const InputFactor& t1, const ComplexMatrix& k_u2,
                  const InflationFactor& b, const ChannelSampleBatch& samples1,
                  const ChannelSampleBatch& samples2) {
    if (t1.dim() != samples1.dim() || samples1.dim() != samples2.dim())
        throw DimensionMismatch("delta_term dimensions inconsistent");
    BorderedKernel kernel(t1, k_u2, b);
    const ComplexMatrix k1 = t1.covariance();
    const RealVector eaves =
        (RealVector::Ones(samples2.count()) + quad_forms(k1, samples2.samples))
            .array()
            .log2();
    return eaves.mean() + kernel.logdet2(samples1.samples).mean();
}

RateEvaluator::PairEstimate RateEvaluator::statistical(
    const InputFactor& t1, const InputFactor& t2, const InflationFactor& b) const {
    const ComplexMatrix k1 = t1.covariance();
    const ComplexMatrix k2 = t2.covariance();
    const ComplexMatrix k12 = k1 + k2;
    BorderedKernel kernel(t1, k2, b);

    const RealVector sum1 =  // log2(1 + h^H (K1+K2) h) over the position-1 batch
        (RealVector::Ones(pi1_.count()) + quad_forms(k12, pi1_.samples))
            .array()
            .log2();
    const RealVector logm = kernel.logdet2(pi1_.samples);
    const RealVector sum2 =
        (RealVector::Ones(pi2_.count()) + quad_forms(k12, pi2_.samples))
            .array()
            .log2();
    const RealVector eaves =
        (RealVector::Ones(pi2_.count()) + quad_forms(k1, pi2_.samples))
            .array()
            .log2();

    const double delta = eaves.mean() + logm.mean();
    PairEstimate est;
    est.raw1 = sum1.mean() - delta;
    est.raw2 = sum2.mean() - delta;
    // Common random numbers: per-stream contributions are differenced before
    // the batch-means error estimate.
    const double se1_a = batch_std_err(sum1 - logm);
    const double se1_b = batch_std_err(eaves);
    est.se1 = std::sqrt(se1_a * se1_a + se1_b * se1_b);
    const double se2_a = batch_std_err(logm);
    const double se2_b = batch_std_err(sum2 - eaves);
    est.se2 = std::sqrt(se2_a * se2_a + se2_b * se2_b);
    return est;
}

RateEvaluator::PairEstimate RateEvaluator::full_csit(
    const CovRule& k1_rule, const CovRule& k2_rule) const {
    if (pi1_.count() != pi2_.count())
        throw DimensionMismatch("full_csit requires paired batches of equal size");
    const Eigen::Index count = pi1_.count();
    RealVector v1(count), v2(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const ComplexVector h1 = pi1_.samples.col(i);
        const ComplexVector h2 = pi2_.samples.col(i);
        const ComplexMatrix k1 = k1_rule(h1, h2);
        const ComplexMatrix k2 = k2_rule(h1, h2);
        const double q11 = std::real(h1.dot(k1 * h1));
        const double q21 = std::real(h2.dot(k1 * h2));
        const double q1s = q11 + std::real(h1.dot(k2 * h1));
        const double q2s = q21 + std::real(h2.dot(k2 * h2));
        v1[i] = std::max(0.0, std::log2((1.0 + q11) / (1.0 + q21)));
        v2[i] = std::max(
            0.0, std::log2((1.0 + q2s) * (1.0 + q11) /
                           ((1.0 + q1s) * (1.0 + q21))));
    }
    PairEstimate est;
    est.raw1 = v1.mean();
    est.raw2 = v2.mean();
    est.se1 = batch_std_err(v1);
    est.se2 = batch_std_err(v2);
    return est;
}

namespace {

// Clamp with a floor absorbing float noise around exact-zero rates, far below
// any Monte Carlo resolution.
double clamp_rate(double raw) { return raw > 1e-12 ? raw : 0.0; }

}  // namespace

RatePair make_rate_pair(const RateEvaluator::PairEstimate& est, Order order,
                        double alpha) {
    RatePair p;
    p.order = order;
    p.alpha = alpha;
    const double c1 = clamp_rate(est.raw1);
    const double c2 = clamp_rate(est.raw2);
    if (order == Order::dpc_user1) {
        p.r1 = c1;
        p.r2 = c2;
        p.std_err = {est.se1, est.se2};
    } else {
        p.r1 = c2;
        p.r2 = c1;
        p.std_err = {est.se2, est.se1};
    }
    return p;
}

namespace {

RateEvaluator evaluator_for(const ChannelStatistics& stats_pi1,
                            const ChannelStatistics& stats_pi2,
                            const SolverConfig& cfg) {
    return RateEvaluator(sample(stats_pi1, cfg.samples, derive_seed(cfg.seed, 1)),
                         sample(stats_pi2, cfg.samples, derive_seed(cfg.seed, 2)));
}

}  // namespace

RatePair rate_pair_statistical(const InputFactor& t1, const InputFactor& t2,
                               const InflationFactor& b, Order order, double alpha,
                               const ChannelStatistics& stats_pi1,
                               const ChannelStatistics& stats_pi2,
                               const SolverConfig& cfg) {
    const RateEvaluator eval = evaluator_for(stats_pi1, stats_pi2, cfg);
    return make_rate_pair(eval.statistical(t1, t2, b), order, alpha);
}

RatePair rate_pair_full_csit(const RateEvaluator::CovRule& k_u1_rule,
                             const RateEvaluator::CovRule& k_u2_rule, Order order,
                             double alpha, const ChannelStatistics& stats_pi1,
                             const ChannelStatistics& stats_pi2,
                             const SolverConfig& cfg) {
    const RateEvaluator eval = evaluator_for(stats_pi1, stats_pi2, cfg);
    return make_rate_pair(eval.full_csit(k_u1_rule, k_u2_rule), order, alpha);
}

}  // namespace fmgbc
