#include "fmgbc/solver.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "delta_kernel.hpp"
#include "fmgbc/beamformer.hpp"
#include "fmgbc/linalg.hpp"
#include "fmgbc/rng.hpp"

namespace fmgbc {

using detail::BorderedKernel;
using detail::quad_forms;

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

double clamp_rate(double raw) { return raw > 1e-12 ? raw : 0.0; }

ComplexMatrix scaled_gram(const ComplexMatrix& cols, const RealVector& weights,
                          const ComplexMatrix& rhs) {
    // sum_i w_i cols_i rhs_i^H / count
    return (cols * weights.cast<Complex>().asDiagonal() * rhs.adjoint()) /
           static_cast<double>(cols.cols());
}

struct MapContext {
    BorderedKernel kernel;
    BorderedKernel::Workspace ws;

    MapContext(const InputFactor& t1, const InputFactor& t2,
               const InflationFactor& b, const ComplexMatrix& batch1)
        : kernel(t1, t2.covariance(), b), ws(kernel.workspace(batch1)) {}
};

ComplexMatrix inflation_step(const MapContext& ctx, const ComplexMatrix& batch1) {
    const Eigen::Index count = batch1.cols();
    const ComplexMatrix ea1 =
        ctx.kernel.tl_inverse() + scaled_gram(ctx.ws.w, ctx.ws.inv_s, ctx.ws.w);
    const ComplexMatrix rhs =  // -E[A2^H h^H]
        (ctx.ws.w * ctx.ws.inv_s.cast<Complex>().asDiagonal() * batch1.adjoint()) /
        static_cast<double>(count);
    Eigen::FullPivLU<ComplexMatrix> lu(ea1);
    if (!lu.isInvertible())
        throw SingularMean("mean inflation-factor coefficient matrix is singular");
    return lu.solve(rhs);
}

ComplexMatrix g1_of(const InflationFactor& b, const InputFactor& t1,
                    const InputFactor& t2, const ChannelSampleBatch& s1,
                    const ChannelSampleBatch& s2) {
    if (t1.rank() == 0) return ComplexMatrix(t1.dim(), 0);
    MapContext ctx(t1, t2, b, s1.samples);
    const ComplexMatrix k1 = t1.covariance();
    const RealVector inv_q1s =
        (RealVector::Ones(s1.count()) + quad_forms(ctx.kernel.k12(), s1.samples))
            .cwiseInverse();
    const RealVector inv_q2e =
        (RealVector::Ones(s2.count()) + quad_forms(k1, s2.samples)).cwiseInverse();
    const ComplexMatrix own = scaled_gram(s1.samples, inv_q1s, s1.samples);
    const ComplexMatrix eaves = scaled_gram(s2.samples, inv_q2e, s2.samples);
    const ComplexMatrix c1 = t1.t.adjoint() * s1.samples;  // rank x count
    const ComplexMatrix borne =
        (s1.samples * ctx.ws.inv_s.cast<Complex>().asDiagonal() *
         (c1 - ctx.ws.w).adjoint()) /
        static_cast<double>(s1.count());
    return ((own - eaves) * t1.t - borne) * kInvLn2;
}

ComplexMatrix g2_of(const InflationFactor& b, const InputFactor& t1,
                    const InputFactor& t2, const ChannelSampleBatch& s1,
                    const ChannelSampleBatch& s2) {
    if (t2.rank() == 0) return ComplexMatrix(t2.dim(), 0);
    MapContext ctx(t1, t2, b, s1.samples);
    const RealVector inv_q2s =
        (RealVector::Ones(s2.count()) + quad_forms(ctx.kernel.k12(), s2.samples))
            .cwiseInverse();
    const ComplexMatrix own = scaled_gram(s2.samples, inv_q2s, s2.samples);
    // E[S^H M^-1 S] with S = [b; h^H] collapses to b^H TL^-1 b + v v^H / s,
    // v = h - b^H w.
    const ComplexMatrix v = s1.samples - b.b.adjoint() * ctx.ws.w;
    const ComplexMatrix ez =
        b.b.adjoint() * ctx.kernel.tl_inverse() * b.b +
        scaled_gram(v, ctx.ws.inv_s, v);
    return (own - ez) * t2.t * kInvLn2;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

TraceRecord record_of(int iteration, const InflationFactor& b,
                      const InputFactor& t1, const InputFactor& t2,
                      const RateEvaluator::PairEstimate& est, double lambda1,
                      double lambda2) {
    TraceRecord rec;
    rec.iteration = iteration;
    rec.b = b.b;
    rec.t1 = t1.t;
    rec.t2 = t2.t;
    rec.lambda1 = lambda1;
    rec.lambda2 = lambda2;
    rec.r1 = clamp_rate(est.raw1);
    rec.r2 = clamp_rate(est.raw2);
    return rec;
}

}  // namespace

ComplexMatrix inflation_map(const InflationFactor& b, const InputFactor& t1,
                            const InputFactor& t2,
                            const ChannelSampleBatch& samples1) {
    if (t1.rank() == 0) return ComplexMatrix(0, t1.dim());
    MapContext ctx(t1, t2, b, samples1.samples);
    return inflation_step(ctx, samples1.samples);
}

KktMaps kkt_maps(const InflationFactor& b, const InputFactor& t1,
                 const InputFactor& t2, const ChannelSampleBatch& samples1,
                 const ChannelSampleBatch& samples2) {
    KktMaps maps;
    maps.f1 = inflation_map(b, t1, t2, samples1);
    maps.g1 = g1_of(b, t1, t2, samples1, samples2);
    maps.g2 = g2_of(b, t1, t2, samples1, samples2);
    return maps;
}

std::pair<InflationFactor, SolverTrace> inflation_fixed_point(
    const InputFactor& t1, const InputFactor& t2, const RateEvaluator& eval,
    const SolverConfig& cfg) {
    SolverTrace trace;
    const Eigen::Index n = t1.dim();
    InflationFactor b = InflationFactor::zero(t1.rank(), n);
    if (t1.rank() == 0 || t2.power() <= 1e-300) {
        // Nothing to pre-cancel; every b is stationary and zero is canonical.
        trace.records.push_back(
            record_of(0, b, t1, t2, eval.statistical(t1, t2, b), 0.0, 0.0));
        trace.converged = true;
        trace.iterations = 0;
        return {b, trace};
    }
    RateEvaluator::PairEstimate est = eval.statistical(t1, t2, b);
    trace.records.push_back(record_of(0, b, t1, t2, est, 0.0, 0.0));
    for (int it = 1; it <= cfg.max_inner; ++it) {
        b = InflationFactor(inflation_map(b, t1, t2, eval.batch1()));
        const RateEvaluator::PairEstimate next = eval.statistical(t1, t2, b);
        trace.records.push_back(record_of(it, b, t1, t2, next, 0.0, 0.0));
        const double move =
            std::max(std::abs(clamp_rate(next.raw1) - clamp_rate(est.raw1)),
                     std::abs(clamp_rate(next.raw2) - clamp_rate(est.raw2)));
        est = next;
        trace.iterations = it;
        if (move < cfg.delta) {
            trace.converged = true;
            break;
        }
    }
    return {b, trace};
}

std::pair<InflationFactor, SolverTrace> inflation_fixed_point(
    const InputFactor& t1, const InputFactor& t2, const ChannelStatistics& pi1,
    const ChannelStatistics& pi2, const SolverConfig& cfg) {
    RateEvaluator eval(sample(pi1, cfg.samples, derive_seed(cfg.seed, 1)),
                       sample(pi2, cfg.samples, derive_seed(cfg.seed, 2)));
    return inflation_fixed_point(t1, t2, eval, cfg);
}

namespace {

InputFactor random_factor(Eigen::Index n, double power, std::uint64_t seed) {
    NormalStream gen(seed);
    ComplexMatrix t(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) t(i, j) = gen.next_complex();
    if (power <= 0.0) return InputFactor(ComplexMatrix(n, 0));
    t *= std::sqrt(power) / t.norm();
    return InputFactor(std::move(t));
}

}  // namespace

KktResult kkt_alternating_optimize(const ChannelStatistics& pi1,
                                   const ChannelStatistics& pi2, double alpha,
                                   double p_t, const SolverConfig& cfg) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DimensionMismatch("alternating optimizer requires interior alpha");
    const Eigen::Index n = pi1.dim();
    RateEvaluator eval(sample(pi1, cfg.samples, derive_seed(cfg.seed, 1)),
                       sample(pi2, cfg.samples, derive_seed(cfg.seed, 2)));

    KktResult res;
    if (cfg.init == InitMode::warm) {
        auto [t1, t2] =
            build_unit_rank_inputs(select_beamformers(pi1, pi2, alpha, p_t), p_t);
        res.t1 = std::move(t1);
        res.t2 = std::move(t2);
    } else {
        res.t1 = random_factor(n, alpha * p_t, derive_seed(cfg.seed, 3));
        res.t2 = random_factor(n, (1.0 - alpha) * p_t, derive_seed(cfg.seed, 4));
    }
    res.b = InflationFactor::zero(res.t1.rank(), n);

    RateEvaluator::PairEstimate est = eval.statistical(res.t1, res.t2, res.b);
    res.trace.records.push_back(record_of(0, res.b, res.t1, res.t2, est, 0.0, 0.0));

    for (int outer = 1; outer <= cfg.max_outer; ++outer) {
        // 2.A: inner fixed point for the inflation factor.
        if (res.t1.rank() > 0 && res.t2.power() > 1e-300) {
            ComplexMatrix bin = res.b.b;
            for (int j = 0; j < cfg.max_inner; ++j) {
                ComplexMatrix bnew = inflation_map(InflationFactor(bin), res.t1,
                                                   res.t2, eval.batch1());
                const double move = max_abs_diff(bnew, bin);
                bin = std::move(bnew);
                if (move <= cfg.eps1) break;
            }
            res.b = InflationFactor(std::move(bin));
        }

        // 2.B: damped normalized iteration on the first factor.
        double lambda1 = 0.0;
        if (res.t1.rank() > 0) {
            ComplexMatrix tin = res.t1.t;
            for (int j = 0; j < cfg.max_inner; ++j) {
                const ComplexMatrix g =
                    g1_of(res.b, InputFactor(tin), res.t2, eval.batch1(),
                          eval.batch2());
                const double tn = tin.norm();
                if (!(tn > 0.0)) break;
                lambda1 = g.norm() / tn;
                if (!(lambda1 > 1e-14)) break;  // stationary or degenerate
                ComplexMatrix tnext =
                    cfg.damping * (g / lambda1) + (1.0 - cfg.damping) * tin;
                const double move = max_abs_diff(tnext, tin);
                tin = std::move(tnext);
                if (move <= cfg.eps2) break;
            }
            res.t1.t = std::move(tin);
        }

        // 2.C: same for the second factor, with the updated first factor.
        double lambda2 = 0.0;
        if (res.t2.rank() > 0) {
            ComplexMatrix tin = res.t2.t;
            for (int j = 0; j < cfg.max_inner; ++j) {
                const ComplexMatrix g =
                    g2_of(res.b, res.t1, InputFactor(tin), eval.batch1(),
                          eval.batch2());
                const double tn = tin.norm();
                if (!(tn > 0.0)) break;
                lambda2 = g.norm() / tn;
                if (!(lambda2 > 1e-14)) break;
                ComplexMatrix tnext =
                    cfg.damping * (g / lambda2) + (1.0 - cfg.damping) * tin;
                const double move = max_abs_diff(tnext, tin);
                tin = std::move(tnext);
                if (move <= cfg.eps3) break;
            }
            res.t2.t = std::move(tin);
        }

        const RateEvaluator::PairEstimate next =
            eval.statistical(res.t1, res.t2, res.b);
        res.trace.records.push_back(
            record_of(outer, res.b, res.t1, res.t2, next, lambda1, lambda2));
        const double move =
            std::max(std::abs(clamp_rate(next.raw1) - clamp_rate(est.raw1)),
                     std::abs(clamp_rate(next.raw2) - clamp_rate(est.raw2)));
        est = next;
        res.trace.iterations = outer;
        if (move <= cfg.delta) {
            res.trace.converged = true;
            break;
        }
    }
    return res;
}

namespace {

struct WeightedProbe {
    RatePair pair;       // encoding-position semantics: r1 = stats1 user
    SolverTrace trace;
    double objective = 0.0;
};

WeightedProbe weighted_probe(const ChannelStatistics& pi1,
                             const ChannelStatistics& pi2, double p_t, double mu,
                             double alpha, const SolverConfig& cfg,
                             std::uint64_t probe_index) {
    SolverConfig local = cfg;
    local.seed = derive_seed(cfg.seed, probe_index);
    WeightedProbe probe;
    if (alpha <= 0.0 || alpha >= 1.0) {
        auto [t1, t2] = build_unit_rank_inputs(
            select_beamformers(pi1, pi2, alpha, p_t), p_t);
        probe.pair = rate_pair_statistical(
            t1, t2, InflationFactor::zero(t1.rank(), t1.dim()), Order::dpc_user1,
            alpha, pi1, pi2, local);
        probe.trace.converged = true;
    } else {
        KktResult kkt = kkt_alternating_optimize(pi1, pi2, alpha, p_t, local);
        probe.pair = rate_pair_statistical(kkt.t1, kkt.t2, kkt.b,
                                           Order::dpc_user1, alpha, pi1, pi2,
                                           local);
        probe.pair.iterations = kkt.trace.iterations;
        probe.pair.converged = kkt.trace.converged;
        probe.trace = std::move(kkt.trace);
    }
    probe.objective = probe.pair.r1 + mu * probe.pair.r2;
    return probe;
}

}  // namespace

WeightedResult weighted_boundary(const ChannelStatistics& pi1,
                                 const ChannelStatistics& pi2, double p_t,
                                 double mu_weight, const SolverConfig& cfg) {
    if (mu_weight < 0.0)
        throw DimensionMismatch("mu_weight must be nonnegative");
    const double mu = std::min(mu_weight, 1e6);

    WeightedResult best;
    best.objective = -1.0;
    std::uint64_t probe_index = 100;
    const auto consider = [&](double alpha) {
        const WeightedProbe probe =
            weighted_probe(pi1, pi2, p_t, mu, alpha, cfg, probe_index++);
        if (probe.objective > best.objective) {
            best.objective = probe.objective;
            best.best = probe.pair;
            best.alpha = alpha;
            best.trace = probe.trace;
        }
    };

    const int coarse = 9;
    for (int i = 0; i < coarse; ++i)
        consider(static_cast<double>(i) / (coarse - 1));
    double step = 1.0 / (coarse - 1);
    for (int round = 0; round < 2; ++round) {
        step *= 0.5;
        const double center = best.alpha;
        for (const double a : {center - step, center + step})
            if (a > 0.0 && a < 1.0) consider(a);
    }
    return best;
}

}  // namespace fmgbc
