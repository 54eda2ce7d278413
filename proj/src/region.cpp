#include "fmgbc/region.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "fmgbc/beamformer.hpp"
#include "fmgbc/parallel.hpp"
#include "fmgbc/rng.hpp"
#include "fmgbc/solver.hpp"

namespace fmgbc {

namespace {

std::vector<RatePair> assemble_hull(const std::vector<RatePair>& points) {
    std::vector<std::array<double, 2>> coords;
    coords.reserve(points.size());
    for (const RatePair& p : points) coords.push_back({p.r1, p.r2});
    std::vector<RatePair> hull;
    for (std::size_t i : upper_hull_indices(coords)) hull.push_back(points[i]);
    if (!hull.empty() && hull.front().r1 > 0.0) {
        RatePair a = hull.front();
        a.r1 = 0.0;
        a.std_err[0] = 0.0;
        a.kind = PointKind::axis;
        hull.insert(hull.begin(), a);
    }
    if (!hull.empty() && hull.back().r2 > 0.0) {
        RatePair a = hull.back();
        a.r2 = 0.0;
        a.std_err[1] = 0.0;
        a.kind = PointKind::axis;
        hull.push_back(a);
    }
    return hull;
}

void check_grid(const std::vector<double>& alpha_grid) {
    if (alpha_grid.empty()) throw DimensionMismatch("alpha grid is empty");
    for (double a : alpha_grid)
        if (!(a >= 0.0 && a <= 1.0))
            throw DimensionMismatch("alpha grid value outside [0, 1]");
}

struct Cell {
    Order order;
    double alpha;
};

std::vector<Cell> make_cells(const std::vector<double>& alpha_grid) {
    std::vector<Cell> cells;
    cells.reserve(2 * alpha_grid.size());
    for (Order o : {Order::dpc_user1, Order::dpc_user2})
        for (double a : alpha_grid) cells.push_back({o, a});
    return cells;
}

void check_finite(const RatePair& p) {
    if (!std::isfinite(p.r1) || !std::isfinite(p.r2))
        throw SolverDiverged("non-finite rate pair in region sweep", p.alpha,
                             order_tag(p.order));
}

}  // namespace

RegionBoundary region_sweep(const ChannelStatistics& stats1,
                            const ChannelStatistics& stats2, double p_t,
                            const std::vector<double>& alpha_grid,
                            SolverStrategy strategy, const SolverConfig& cfg) {
    check_grid(alpha_grid);
    if (!(p_t > 0.0)) throw DimensionMismatch("p_t must be positive");
    const std::vector<Cell> cells = make_cells(alpha_grid);
    std::vector<RatePair> points(cells.size());

    parallel_for(cells.size(), [&](std::size_t i) {
        const Cell& cell = cells[i];
        const ChannelStatistics& pi1 =
            cell.order == Order::dpc_user1 ? stats1 : stats2;
        const ChannelStatistics& pi2 =
            cell.order == Order::dpc_user1 ? stats2 : stats1;
        SolverConfig local = cfg;
        local.seed = derive_seed(cfg.seed, i);

        RatePair p;
        const bool interior = cell.alpha > 0.0 && cell.alpha < 1.0;
        if (strategy == SolverStrategy::kkt && interior) {
            KktResult kkt =
                kkt_alternating_optimize(pi1, pi2, cell.alpha, p_t, local);
            p = rate_pair_statistical(kkt.t1, kkt.t2, kkt.b, cell.order,
                                      cell.alpha, pi1, pi2, local);
            p.iterations = kkt.trace.iterations;
            p.converged = kkt.trace.converged;
        } else {
            auto [t1, t2] = build_unit_rank_inputs(
                select_beamformers(pi1, pi2, cell.alpha, p_t), p_t);
            RateEvaluator eval(
                sample(pi1, local.samples, derive_seed(local.seed, 1)),
                sample(pi2, local.samples, derive_seed(local.seed, 2)));
            auto [b, tr] = inflation_fixed_point(t1, t2, eval, local);
            p = make_rate_pair(eval.statistical(t1, t2, b), cell.order,
                               cell.alpha);
            p.iterations = tr.iterations;
            p.converged = tr.converged;
        }
        check_finite(p);
        points[i] = p;
    });

    RegionBoundary boundary;
    boundary.points = std::move(points);
    boundary.hull = assemble_hull(boundary.points);
    boundary.provenance =
        strategy == SolverStrategy::kkt ? "kkt" : "beamformer_fixedpoint";
    return boundary;
}

RegionBoundary full_csit_region(const ChannelStatistics& stats1,
                                const ChannelStatistics& stats2, double p_t,
                                const std::vector<double>& alpha_grid,
                                const SolverConfig& cfg) {
    check_grid(alpha_grid);
    if (!(p_t > 0.0)) throw DimensionMismatch("p_t must be positive");
    const std::vector<Cell> cells = make_cells(alpha_grid);
    std::vector<RatePair> points(cells.size());

    parallel_for(cells.size(), [&](std::size_t i) {
        const Cell& cell = cells[i];
        const ChannelStatistics& pi1 =
            cell.order == Order::dpc_user1 ? stats1 : stats2;
        const ChannelStatistics& pi2 =
            cell.order == Order::dpc_user1 ? stats2 : stats1;
        SolverConfig local = cfg;
        local.seed = derive_seed(cfg.seed, i);
        auto [t1, t2] = build_unit_rank_inputs(
            select_beamformers(pi1, pi2, cell.alpha, p_t), p_t);
        const ComplexMatrix k1 = t1.covariance();
        const ComplexMatrix k2 = t2.covariance();
        RatePair p = rate_pair_full_csit(
            [&k1](const ComplexVector&, const ComplexVector&) { return k1; },
            [&k2](const ComplexVector&, const ComplexVector&) { return k2; },
            cell.order, cell.alpha, pi1, pi2, local);
        check_finite(p);
        points[i] = p;
    });

    RegionBoundary boundary;
    boundary.points = std::move(points);
    boundary.hull = assemble_hull(boundary.points);
    boundary.provenance = "full_csit";
    return boundary;
}

namespace {

// Single-user wiretap rate at power p: full-power beamformer for the active
// user, the other input empty, interference treated as absent.
std::pair<double, double> wiretap_rate(const ChannelStatistics& active,
                                       const ChannelStatistics& passive, double p,
                                       const SolverConfig& cfg,
                                       std::uint64_t seed) {
    if (!(p > 0.0)) return {0.0, 0.0};
    auto [t1, t2] =
        build_unit_rank_inputs(select_beamformers(active, passive, 1.0, p), p);
    RateEvaluator eval(sample(active, cfg.samples, derive_seed(seed, 1)),
                       sample(passive, cfg.samples, derive_seed(seed, 2)));
    const RateEvaluator::PairEstimate est =
        eval.statistical(t1, t2, InflationFactor::zero(t1.rank(), t1.dim()));
    return {std::max(0.0, est.raw1), est.se1};
}

}  // namespace

RegionBoundary time_sharing_region(const ChannelStatistics& stats1,
                                   const ChannelStatistics& stats2, double p_t,
                                   const TimeSharingGrid& grid,
                                   const SolverConfig& cfg) {
    if (!(p_t > 0.0)) throw DimensionMismatch("p_t must be positive");
    if (grid.tau_steps < 2 || grid.power_steps < 2)
        throw DimensionMismatch("time-sharing grid needs at least 2 steps per axis");

    struct TsCell {
        double tau;
        double beta;  // share of the budget spent during the user-1 fraction
        bool corner;
    };
    std::vector<TsCell> cells;
    for (int ti = 0; ti < grid.tau_steps; ++ti) {
        const double tau = static_cast<double>(ti) / (grid.tau_steps - 1);
        if (tau <= 0.0 || tau >= 1.0) {
            cells.push_back({tau, tau, true});
            continue;
        }
        for (int bi = 0; bi < grid.power_steps; ++bi)
            cells.push_back(
                {tau, static_cast<double>(bi) / (grid.power_steps - 1), false});
    }

    std::vector<RatePair> points(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) {
        const TsCell& cell = cells[i];
        const std::uint64_t seed = derive_seed(cfg.seed, 1000 + i);
        RatePair p;
        p.kind = PointKind::time_share;
        p.alpha = cell.tau;
        if (cell.corner) {
            if (cell.tau >= 1.0) {
                auto [r, se] =
                    wiretap_rate(stats1, stats2, p_t, cfg, derive_seed(seed, 1));
                p.r1 = r;
                p.std_err[0] = se;
            } else {
                auto [r, se] =
                    wiretap_rate(stats2, stats1, p_t, cfg, derive_seed(seed, 2));
                p.r2 = r;
                p.std_err[1] = se;
            }
        } else {
            const double pa = cell.beta * p_t / cell.tau;
            const double pb = (1.0 - cell.beta) * p_t / (1.0 - cell.tau);
            auto [r1, se1] =
                wiretap_rate(stats1, stats2, pa, cfg, derive_seed(seed, 1));
            auto [r2, se2] =
                wiretap_rate(stats2, stats1, pb, cfg, derive_seed(seed, 2));
            p.r1 = cell.tau * r1;
            p.r2 = (1.0 - cell.tau) * r2;
            p.std_err = {cell.tau * se1, (1.0 - cell.tau) * se2};
        }
        check_finite(p);
        points[i] = p;
    });

    RegionBoundary boundary;
    boundary.points = std::move(points);
    boundary.hull = assemble_hull(boundary.points);
    boundary.provenance = "time_sharing";
    return boundary;
}

double hull_value(const std::vector<RatePair>& hull, double r1) {
    if (hull.empty() || r1 < 0.0) return 0.0;
    if (r1 <= hull.front().r1) return hull.front().r2;
    for (std::size_t i = 1; i < hull.size(); ++i) {
        if (r1 <= hull[i].r1) {
            const double x0 = hull[i - 1].r1, y0 = hull[i - 1].r2;
            const double x1 = hull[i].r1, y1 = hull[i].r2;
            if (x1 == x0) return std::max(y0, y1);
            const double t = (r1 - x0) / (x1 - x0);
            return y0 + t * (y1 - y0);
        }
    }
    return 0.0;
}

bool hull_encloses(const std::vector<RatePair>& outer,
                   const std::vector<RatePair>& inner, double slack,
                   int probes) {
    if (inner.empty()) return true;
    double xmax = 0.0;
    for (const RatePair& p : inner) xmax = std::max(xmax, p.r1);
    const auto ok = [&](double x) {
        return hull_value(outer, x) + slack >= hull_value(inner, x);
    };
    for (const RatePair& p : inner)
        if (!ok(p.r1)) return false;
    for (int i = 0; i < probes; ++i)
        if (!ok(xmax * i / std::max(1, probes - 1))) return false;
    return true;
}

double max_hull_std_err(const std::vector<RatePair>& hull) {
    double m = 0.0;
    for (const RatePair& p : hull)
        m = std::max(m, std::hypot(p.std_err[0], p.std_err[1]));
    return m;
}

}  // namespace fmgbc
