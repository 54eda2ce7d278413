#include <doctest.h>

#include <cmath>

#include "fmgbc/beamformer.hpp"
#include "fmgbc/solver.hpp"
#include "test_util.hpp"

using namespace fmgbc;
using namespace fmgbc::testing;

namespace {

RateEvaluator make_eval(const ChannelStatistics& pi1, const ChannelStatistics& pi2,
                        Eigen::Index count, std::uint64_t seed) {
    return RateEvaluator(sample(pi1, count, derive_seed(seed, 1)),
                         sample(pi2, count, derive_seed(seed, 2)));
}

// Central finite difference of a sampled functional with respect to the real
// and imaginary parts of every entry of `m`, packed like the analytic
// conjugate gradient (dR = 2 Re tr(g^H dM)).
template <typename F>
ComplexMatrix fd_gradient(ComplexMatrix m, const F& value, double step) {
    ComplexMatrix g(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const Complex orig = m(i, j);
            m(i, j) = orig + step;
            const double re_p = value(m);
            m(i, j) = orig - step;
            const double re_m = value(m);
            m(i, j) = orig + Complex(0.0, step);
            const double im_p = value(m);
            m(i, j) = orig - Complex(0.0, step);
            const double im_m = value(m);
            m(i, j) = orig;
            g(i, j) = 0.5 * Complex((re_p - re_m) / (2.0 * step),
                                    (im_p - im_m) / (2.0 * step));
        }
    }
    return g;
}

}  // namespace

TEST_CASE("no interference means a zero inflation factor immediately") {
    const ChannelStatistics s1 = example_rayleigh1();
    const ChannelStatistics s2 = example_rayleigh2();
    const auto [t1, t2] =
        build_unit_rank_inputs(select_beamformers(s1, s2, 1.0, 10.0), 10.0);
    REQUIRE(t2.rank() == 0);
    SolverConfig cfg;
    cfg.samples = 2000;
    const auto [b, trace] = inflation_fixed_point(t1, t2, s1, s2, cfg);
    CHECK(trace.converged);
    CHECK(trace.iterations == 0);
    CHECK(b.b.rows() == 1);
    CHECK(max_abs(b.b) == 0.0);
}

TEST_CASE("fixed point improves on treating interference as noise") {
    const ChannelStatistics s1 = example_rayleigh1();
    const ChannelStatistics s2 = example_rayleigh2();
    const auto [t1, t2] =
        build_unit_rank_inputs(select_beamformers(s1, s2, 0.5, 10.0), 10.0);
    const RateEvaluator eval = make_eval(s1, s2, 50000, 3001);
    SolverConfig cfg;
    cfg.samples = 50000;
    const auto [b, trace] = inflation_fixed_point(t1, t2, eval, cfg);
    CHECK(trace.converged);
    const RateEvaluator::PairEstimate with_b = eval.statistical(t1, t2, b);
    const RateEvaluator::PairEstimate without =
        eval.statistical(t1, t2, InflationFactor::zero(t1.rank(), 2));
    CHECK(with_b.raw1 >= without.raw1 - 3.0 * (with_b.se1 + without.se1));
    CHECK(max_abs(b.b) > 0.0);
}

TEST_CASE("fixed-point residual stays within the tolerance band") {
    const ChannelStatistics s1 = example_rician1();
    const ChannelStatistics s2 = example_rician2();
    const auto [t1, t2] =
        build_unit_rank_inputs(select_beamformers(s1, s2, 0.5, 10.0), 10.0);
    const RateEvaluator eval = make_eval(s1, s2, 20000, 3002);
    SolverConfig cfg;
    cfg.samples = 20000;
    const auto [b, trace] = inflation_fixed_point(t1, t2, eval, cfg);
    REQUIRE(trace.converged);
    const ComplexMatrix next = inflation_map(b, t1, t2, eval.batch1());
    CHECK(max_abs(next - b.b) <= 10.0 * cfg.eps1);
}

TEST_CASE("stationary inflation factor zeroes the sampled derivative") {
    const ChannelStatistics s1 = example_rician1();
    const ChannelStatistics s2 = example_rician2();
    const auto [t1f, t2f] =
        build_unit_rank_inputs(select_beamformers(s1, s2, 0.5, 10.0), 10.0);
    const InputFactor t1 = t1f, t2 = t2f;
    const RateEvaluator eval = make_eval(s1, s2, 10000, 3003);

    // Drive the map hard so b is a stationary point of the sampled bound.
    ComplexMatrix b = ComplexMatrix::Zero(t1.rank(), 2);
    for (int it = 0; it < 60; ++it)
        b = inflation_map(InflationFactor(b), t1, t2, eval.batch1());

    const auto raw1 = [&](const ComplexMatrix& bb) {
        return eval.statistical(t1, t2, InflationFactor(bb)).raw1;
    };
    const ComplexMatrix g_at_fixed = fd_gradient(b, raw1, 1e-4);
    const ComplexMatrix g_at_zero =
        fd_gradient(ComplexMatrix::Zero(t1.rank(), 2), raw1, 1e-4);
    CHECK(g_at_fixed.norm() <= 0.05 * g_at_zero.norm());
}

TEST_CASE("stationarity maps match finite differences of the sampled bounds") {
    NormalStream gen(3004);
    for (int trial = 0; trial < 4; ++trial) {
        const ComplexMatrix k1 =
            random_psd(2, gen) * 0.2 + 0.05 * ComplexMatrix::Identity(2, 2);
        const ComplexMatrix k2 =
            random_psd(2, gen) * 0.2 + 0.05 * ComplexMatrix::Identity(2, 2);
        const ChannelStatistics s1(random_unit(2, gen) * 0.4, k1);
        const ChannelStatistics s2(random_unit(2, gen) * 0.4, k2);
        const InputFactor t1(random_complex(2, 1, gen));
        const InputFactor t2(random_complex(2, 1 + trial % 2, gen));
        const InflationFactor b(random_complex(1, 2, gen) * 0.3);
        const RateEvaluator eval = make_eval(s1, s2, 4000, 3100 + trial);

        const KktMaps maps = kkt_maps(b, t1, t2, eval.batch1(), eval.batch2());

        const ComplexMatrix fd1 = fd_gradient(
            t1.t,
            [&](const ComplexMatrix& m) {
                return eval.statistical(InputFactor(m), t2, b).raw1;
            },
            1e-4);
        CHECK((fd1 - maps.g1).norm() <= 0.05 * maps.g1.norm());

        const ComplexMatrix fd2 = fd_gradient(
            t2.t,
            [&](const ComplexMatrix& m) {
                return eval.statistical(t1, InputFactor(m), b).raw2;
            },
            1e-4);
        CHECK((fd2 - maps.g2).norm() <= 0.05 * maps.g2.norm());
    }
}

TEST_CASE("zero second factor degenerates the second map") {
    const ChannelStatistics s1 = example_rayleigh1();
    const ChannelStatistics s2 = example_rayleigh2();
    const auto [t1, t2] =
        build_unit_rank_inputs(select_beamformers(s1, s2, 1.0, 10.0), 10.0);
    const RateEvaluator eval = make_eval(s1, s2, 1000, 3005);
    const KktMaps maps = kkt_maps(InflationFactor::zero(t1.rank(), 2), t1, t2,
                                  eval.batch1(), eval.batch2());
    CHECK(maps.g2.cols() == 0);
    CHECK(maps.g1.cols() == 1);
}

TEST_CASE("alternating optimizer converges and respects budgets") {
    const ChannelStatistics s1 = example_rayleigh1();
    const ChannelStatistics s2 = example_rayleigh2();
    SolverConfig cfg;
    cfg.samples = 20000;
    cfg.seed = 3006;
    const double alpha = 0.5, p_t = 10.0;
    const KktResult res = kkt_alternating_optimize(s1, s2, alpha, p_t, cfg);
    CHECK(res.trace.converged);
    CHECK(res.trace.iterations <= cfg.max_outer);
    for (const TraceRecord& rec : res.trace.records) {
        CHECK(rec.t1.squaredNorm() <= alpha * p_t + 1e-6);
        CHECK(rec.t2.squaredNorm() <= (1.0 - alpha) * p_t + 1e-6);
    }
    // Step-3 contract: the last recorded move is within delta.
    const auto& recs = res.trace.records;
    REQUIRE(recs.size() >= 2);
    const double move =
        std::max(std::abs(recs.back().r1 - recs[recs.size() - 2].r1),
                 std::abs(recs.back().r2 - recs[recs.size() - 2].r2));
    CHECK(move <= cfg.delta);
}

TEST_CASE("alternating optimizer is reproducible") {
    SolverConfig cfg;
    cfg.samples = 5000;
    cfg.seed = 3007;
    const KktResult a = kkt_alternating_optimize(example_rician1(),
                                                 example_rician2(), 0.4, 10.0, cfg);
    const KktResult b = kkt_alternating_optimize(example_rician1(),
                                                 example_rician2(), 0.4, 10.0, cfg);
    REQUIRE(a.trace.records.size() == b.trace.records.size());
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
        CHECK(a.trace.records[i].r1 == b.trace.records[i].r1);
        CHECK(a.trace.records[i].r2 == b.trace.records[i].r2);
    }
    CHECK(max_abs(a.b.b - b.b.b) == 0.0);
}

TEST_CASE("warm start matches the beamformer ranks") {
    SolverConfig cfg;
    cfg.samples = 5000;
    cfg.seed = 3008;
    cfg.init = InitMode::warm;
    const KktResult res = kkt_alternating_optimize(example_rayleigh1(),
                                                   example_rayleigh2(), 0.5, 10.0,
                                                   cfg);
    CHECK(res.t1.rank() == 1);
    CHECK(res.t2.rank() == 1);
    CHECK(res.trace.converged);
}

TEST_CASE("weighted boundary drives the corner shares") {
    SolverConfig cfg;
    cfg.samples = 3000;
    cfg.seed = 3009;
    cfg.max_outer = 15;
    const WeightedResult zero_mu = weighted_boundary(
        example_rayleigh1(), example_rayleigh2(), 10.0, 0.0, cfg);
    CHECK(zero_mu.alpha == doctest::Approx(1.0));
    CHECK(zero_mu.best.r2 == 0.0);
    const WeightedResult huge_mu = weighted_boundary(
        example_rayleigh1(), example_rayleigh2(), 10.0, 1e9, cfg);
    CHECK(huge_mu.alpha == doctest::Approx(0.0));
    CHECK(huge_mu.best.r1 == 0.0);
}
