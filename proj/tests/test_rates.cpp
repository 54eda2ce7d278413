#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fmgbc/beamformer.hpp"
#include "fmgbc/rates.hpp"
#include "fmgbc/rng.hpp"
#include "test_util.hpp"

using namespace fmgbc;
using namespace fmgbc::testing;

namespace {

RateEvaluator make_eval(const ChannelStatistics& pi1, const ChannelStatistics& pi2,
                        Eigen::Index count, std::uint64_t seed) {
    return RateEvaluator(sample(pi1, count, derive_seed(seed, 1)),
                         sample(pi2, count, derive_seed(seed, 2)));
}

}  // namespace

TEST_CASE("upper hull keeps the two corner points") {
    const auto hull = upper_hull({{1.0, 0.0}, {0.0, 1.0}});
    REQUIRE(hull.size() == 2);
    CHECK(hull[0][0] == 0.0);
    CHECK(hull[0][1] == 1.0);
    CHECK(hull[1][0] == 1.0);
    CHECK(hull[1][1] == 0.0);
}

TEST_CASE("upper hull drops dominated points") {
    const auto hull = upper_hull({{1.0, 1.0}, {0.5, 0.5}});
    REQUIRE(hull.size() == 1);
    CHECK(hull[0][0] == 1.0);
    CHECK(hull[0][1] == 1.0);
}

TEST_CASE("upper hull against a pairwise oracle") {
    NormalStream gen(29);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 100; ++i)
        pts.push_back({std::abs(gen.next()), std::abs(gen.next())});
    const auto idx = upper_hull_indices(pts);
    REQUIRE(!idx.empty());

    // Hull vertices are input points, ordered and strictly decreasing.
    for (std::size_t k = 1; k < idx.size(); ++k) {
        CHECK(pts[idx[k]][0] > pts[idx[k - 1]][0]);
        CHECK(pts[idx[k]][1] < pts[idx[k - 1]][1]);
    }

    // Every input point lies on or below the piecewise frontier.
    const auto frontier = [&](double x) {
        if (x <= pts[idx.front()][0]) return pts[idx.front()][1];
        for (std::size_t k = 1; k < idx.size(); ++k) {
            const auto& a = pts[idx[k - 1]];
            const auto& b = pts[idx[k]];
            if (x <= b[0])
                return a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0]);
        }
        return 0.0;
    };
    for (const auto& p : pts) CHECK(p[1] <= frontier(p[0]) + 1e-12);

    // No hull vertex dominates another (oracle by exhaustive pairs).
    for (std::size_t a : idx)
        for (std::size_t b : idx)
            if (a != b)
                CHECK(!(pts[a][0] >= pts[b][0] && pts[a][1] >= pts[b][1]));
}

TEST_CASE("upper hull is invariant under permutation") {
    NormalStream gen(33);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 40; ++i)
        pts.push_back({std::abs(gen.next()), std::abs(gen.next())});
    auto hull = upper_hull(pts);
    std::reverse(pts.begin(), pts.end());
    std::swap(pts[3], pts[17]);
    const auto hull2 = upper_hull(pts);
    REQUIRE(hull.size() == hull2.size());
    for (std::size_t i = 0; i < hull.size(); ++i) {
        CHECK(hull[i][0] == hull2[i][0]);
        CHECK(hull[i][1] == hull2[i][1]);
    }
}

TEST_CASE("bordered log-determinant matches the dense cofactor oracle") {
    NormalStream gen(41);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index n = 2 + trial % 2;
        const Eigen::Index rank1 = 1 + trial % 2;
        const Eigen::Index rank2 = 1 + (trial / 2) % 2;
        const InputFactor t1(random_complex(n, rank1, gen));
        const InputFactor t2(random_complex(n, rank2, gen));
        const InflationFactor b(random_complex(rank1, n, gen));
        const ComplexVector h = random_complex(n, 1, gen);
        const ComplexMatrix k2 = t2.covariance();

        ComplexMatrix m(rank1 + 1, rank1 + 1);
        m.topLeftCorner(rank1, rank1) =
            ComplexMatrix::Identity(rank1, rank1) + b.b * k2 * b.b.adjoint();
        m.topRightCorner(rank1, 1) = (t1.t.adjoint() + b.b * k2) * h;
        m.bottomLeftCorner(1, rank1) = h.adjoint() * (t1.t + k2 * b.b.adjoint());
        m(rank1, rank1) =
            1.0 + std::real(h.dot((t1.covariance() + k2) * h));
        const double direct = std::log2(cofactor_det(m).real());
        CHECK(logdet2_bordered_m(t1, k2, b, h) ==
              doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("zero inflation factor collapses the penalty term") {
    const ChannelStatistics s1 = example_rayleigh1();
    const ChannelStatistics s2 = example_rayleigh2();
    const RateEvaluator eval = make_eval(s1, s2, 5000, 77);
    const auto [t1, t2] = build_unit_rank_inputs(
        select_beamformers(s1, s2, 0.5, 10.0), 10.0);
    const InflationFactor b0 = InflationFactor::zero(t1.rank(), 2);
    const double delta = eval.delta(t1, t2, b0);

    // With b = 0 the determinant collapses to 1 + h^H K2 h per sample.
    const ComplexMatrix k1 = t1.covariance();
    const ComplexMatrix k2 = t2.covariance();
    double direct = 0.0;
    for (Eigen::Index i = 0; i < eval.batch2().count(); ++i) {
        const ComplexVector h = eval.batch2().samples.col(i);
        direct += std::log2(1.0 + std::real(h.dot(k1 * h)));
    }
    direct /= static_cast<double>(eval.batch2().count());
    for (Eigen::Index i = 0; i < eval.batch1().count(); ++i) {
        const ComplexVector h = eval.batch1().samples.col(i);
        direct += std::log2(1.0 + std::real(h.dot(k2 * h))) /
                  static_cast<double>(eval.batch1().count());
    }
    CHECK(delta == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("wiretap degeneration of the penalty term") {
    const ChannelStatistics s1 = example_rayleigh1();
    const ChannelStatistics s2 = example_rayleigh2();
    const RateEvaluator eval = make_eval(s1, s2, 5000, 78);
    const auto [t1, t2] =
        build_unit_rank_inputs(select_beamformers(s1, s2, 1.0, 10.0), 10.0);
    REQUIRE(t2.rank() == 0);
    const double delta =
        eval.delta(t1, t2, InflationFactor::zero(t1.rank(), 2));
    const ComplexMatrix k1 = t1.covariance();
    double direct = 0.0;
    for (Eigen::Index i = 0; i < eval.batch2().count(); ++i) {
        const ComplexVector h = eval.batch2().samples.col(i);
        direct += std::log2(1.0 + std::real(h.dot(k1 * h)));
    }
    direct /= static_cast<double>(eval.batch2().count());
    CHECK(delta == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("no power means no rate") {
    const RateEvaluator eval =
        make_eval(example_rayleigh1(), example_rayleigh2(), 2000, 79);
    const InputFactor empty1{ComplexMatrix(2, 0)};
    const InputFactor empty2{ComplexMatrix(2, 0)};
    const RatePair p = make_rate_pair(
        eval.statistical(empty1, empty2, InflationFactor::zero(0, 2)),
        Order::dpc_user1, 0.5);
    CHECK(p.r1 == 0.0);
    CHECK(p.r2 == 0.0);
}

TEST_CASE("scaled covariances force one user to zero rate") {
    const ComplexMatrix k = example_cov1();
    const ChannelStatistics s1(ComplexVector::Zero(2), k);
    const ChannelStatistics s2(ComplexVector::Zero(2), (4.0 * k).eval());
    for (double alpha : {0.3, 0.7}) {
        const auto [t1, t2] =
            build_unit_rank_inputs(select_beamformers(s1, s2, alpha, 10.0), 10.0);
        SolverConfig cfg;
        cfg.samples = 100000;
        cfg.seed = 80;
        const RatePair p = rate_pair_statistical(
            t1, t2, InflationFactor::zero(t1.rank(), 2), Order::dpc_user1, alpha,
            s1, s2, cfg);
        const double se = 3.0 * std::hypot(p.std_err[0], p.std_err[1]);
        CHECK(std::min(p.r1, p.r2) <= se);
    }
}

TEST_CASE("rates are clamped and clamping is idempotent") {
    // Degraded direction: the raw bound is negative, the pair reports zero.
    const ComplexMatrix k = example_cov1();
    const ChannelStatistics s1(ComplexVector::Zero(2), k);
    const ChannelStatistics s2(ComplexVector::Zero(2), (4.0 * k).eval());
    const RateEvaluator eval = make_eval(s1, s2, 20000, 81);
    const auto [t1, t2] =
        build_unit_rank_inputs(select_beamformers(s1, s2, 1.0, 10.0), 10.0);
    const RateEvaluator::PairEstimate est =
        eval.statistical(t1, t2, InflationFactor::zero(t1.rank(), 2));
    CHECK(est.raw1 < 0.0);
    const RatePair p = make_rate_pair(est, Order::dpc_user1, 1.0);
    CHECK(p.r1 == 0.0);
    CHECK(p.r1 == std::max(0.0, p.r1));
    CHECK(p.r2 >= 0.0);
}

TEST_CASE("wiretap rate matches an independent Monte Carlo oracle") {
    const ChannelStatistics s1 = example_rayleigh1();
    const ChannelStatistics s2 = example_rayleigh2();
    const auto [t1, t2] =
        build_unit_rank_inputs(select_beamformers(s1, s2, 1.0, 10.0), 10.0);
    SolverConfig cfg;
    cfg.samples = 100000;
    cfg.seed = 82;
    const RatePair p = rate_pair_statistical(
        t1, t2, InflationFactor::zero(t1.rank(), 2), Order::dpc_user1, 1.0, s1,
        s2, cfg);

    // Oracle: fresh seed, plain loop, no shared machinery.
    const ComplexMatrix k1 = t1.covariance();
    const Eigen::Index n = 200000;
    const ChannelSampleBatch own = sample(s1, n, 9901);
    const ChannelSampleBatch other = sample(s2, n, 9902);
    double gain = 0.0, loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const ComplexVector a = own.samples.col(i);
        const ComplexVector b = other.samples.col(i);
        gain += std::log2(1.0 + std::real(a.dot(k1 * a)));
        loss += std::log2(1.0 + std::real(b.dot(k1 * b)));
    }
    const double oracle = std::max(0.0, (gain - loss) / static_cast<double>(n));
    CHECK(std::abs(p.r1 - oracle) <=
          3.0 * (p.std_err[0] + 0.004));  // oracle noise allowance
}

TEST_CASE("full-CSIT pair vanishes for identical realizations") {
    ComplexVector mu(2);
    mu << 0.4, 0.9;
    const ChannelStatistics same(mu, ComplexMatrix::Zero(2, 2));
    const RateEvaluator eval = make_eval(same, same, 500, 83);
    const ComplexMatrix k = 5.0 * ComplexMatrix::Identity(2, 2) / 2.0;
    const auto rule = [&k](const ComplexVector&, const ComplexVector&) {
        return k;
    };
    const RateEvaluator::PairEstimate est = eval.full_csit(rule, rule);
    CHECK(est.raw1 == 0.0);
    CHECK(est.raw2 == 0.0);
}

TEST_CASE("full-CSIT with a null second message is the fading wiretap") {
    const ChannelStatistics s1 = example_rayleigh1();
    const ChannelStatistics s2 = example_rayleigh2();
    const RateEvaluator eval = make_eval(s1, s2, 4000, 84);
    const ComplexMatrix k1 =
        build_unit_rank_inputs(select_beamformers(s1, s2, 1.0, 10.0), 10.0)
            .first.covariance();
    const ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
    const RateEvaluator::PairEstimate est = eval.full_csit(
        [&](const ComplexVector&, const ComplexVector&) { return k1; },
        [&](const ComplexVector&, const ComplexVector&) { return zero; });
    CHECK(est.raw2 == 0.0);

    double direct = 0.0;
    for (Eigen::Index i = 0; i < eval.batch1().count(); ++i) {
        const ComplexVector a = eval.batch1().samples.col(i);
        const ComplexVector b = eval.batch2().samples.col(i);
        direct += std::max(
            0.0, std::log2((1.0 + std::real(a.dot(k1 * a))) /
                           (1.0 + std::real(b.dot(k1 * b)))));
    }
    direct /= static_cast<double>(eval.batch1().count());
    CHECK(est.raw1 == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("full-CSIT dominates the statistical pair at matched inputs") {
    const ChannelStatistics s1 = example_rayleigh1();
    const ChannelStatistics s2 = example_rayleigh2();
    const RateEvaluator eval = make_eval(s1, s2, 50000, 85);
    const auto [t1, t2] =
        build_unit_rank_inputs(select_beamformers(s1, s2, 0.5, 10.0), 10.0);
    const ComplexMatrix k1 = t1.covariance();
    const ComplexMatrix k2 = t2.covariance();
    const RateEvaluator::PairEstimate stat =
        eval.statistical(t1, t2, InflationFactor::zero(t1.rank(), 2));
    const RateEvaluator::PairEstimate full = eval.full_csit(
        [&](const ComplexVector&, const ComplexVector&) { return k1; },
        [&](const ComplexVector&, const ComplexVector&) { return k2; });
    CHECK(full.raw1 >= stat.raw1 - 3.0 * (full.se1 + stat.se1));
    CHECK(full.raw2 >= stat.raw2 - 3.0 * (full.se2 + stat.se2));
}
