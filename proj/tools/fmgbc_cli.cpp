#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <string>

#include "fmgbc/beamformer.hpp"
#include "fmgbc/io.hpp"
#include "fmgbc/lowsnr.hpp"
#include "fmgbc/region.hpp"
#include "fmgbc/rng.hpp"
#include "fmgbc/solver.hpp"

namespace {

using namespace fmgbc;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitSolverFailure = 2;

struct CommonArgs {
    std::string config_path;
    CliOverrides overrides;
    long long samples = 0;
    unsigned long long seed = 0;
    int alpha_steps = 0;
    std::string output;
    std::string format;
    bool validate = false;
    bool nats = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file")->required();
    cmd->add_option("--samples", args.samples, "Monte Carlo samples per expectation");
    cmd->add_option("--seed", args.seed, "base random seed");
    cmd->add_option("--alpha-steps", args.alpha_steps,
                    "replace the alpha grid by this many uniform steps");
    cmd->add_option("--output", args.output, "output file path");
    cmd->add_option("--format", args.format, "csv or json");
    cmd->add_flag("--nats", args.nats, "report rates in nats instead of bits");
}

RunConfig resolve(const CommonArgs& args) {
    CliOverrides ov;
    if (args.samples > 0) ov.samples = args.samples;
    if (args.seed > 0) ov.seed = args.seed;
    if (args.alpha_steps > 0) ov.alpha_steps = args.alpha_steps;
    if (!args.output.empty()) ov.output = args.output;
    if (!args.format.empty()) ov.format = args.format;
    ov.nats = args.nats;
    return load_run_config(args.config_path, ov);
}

RegionBoundary weighted_region(const RunConfig& cfg) {
    RegionBoundary boundary;
    boundary.provenance = "weighted";
    std::size_t probe = 0;
    for (Order order : {Order::dpc_user1, Order::dpc_user2}) {
        const ChannelStatistics& pi1 =
            order == Order::dpc_user1 ? cfg.channels[0] : cfg.channels[1];
        const ChannelStatistics& pi2 =
            order == Order::dpc_user1 ? cfg.channels[1] : cfg.channels[0];
        for (double mu : cfg.mu_grid) {
            SolverConfig local = cfg.solver_cfg;
            local.seed = derive_seed(cfg.solver_cfg.seed, 500 + probe++);
            WeightedResult res = weighted_boundary(pi1, pi2, cfg.p_t, mu, local);
            RatePair p = res.best;  // r1 is the pi1 user's rate
            if (order == Order::dpc_user2) {
                std::swap(p.r1, p.r2);
                std::swap(p.std_err[0], p.std_err[1]);
            }
            p.order = order;
            p.alpha = res.alpha;
            boundary.points.push_back(p);
        }
    }
    std::vector<std::array<double, 2>> coords;
    for (const RatePair& p : boundary.points) coords.push_back({p.r1, p.r2});
    for (std::size_t i : upper_hull_indices(coords))
        boundary.hull.push_back(boundary.points[i]);
    if (!boundary.hull.empty() && boundary.hull.front().r1 > 0.0) {
        RatePair a = boundary.hull.front();
        a.r1 = 0.0;
        a.std_err[0] = 0.0;
        a.kind = PointKind::axis;
        boundary.hull.insert(boundary.hull.begin(), a);
    }
    if (!boundary.hull.empty() && boundary.hull.back().r2 > 0.0) {
        RatePair a = boundary.hull.back();
        a.r2 = 0.0;
        a.std_err[1] = 0.0;
        a.kind = PointKind::axis;
        boundary.hull.push_back(a);
    }
    return boundary;
}

int cmd_region(const CommonArgs& args) {
    const RunConfig cfg = resolve(args);
    RegionBoundary boundary;
    switch (cfg.solver) {
        case SolverKind::beamformer_fixedpoint:
            boundary = region_sweep(cfg.channels[0], cfg.channels[1], cfg.p_t,
                                    cfg.alpha_grid,
                                    SolverStrategy::beamformer_fixedpoint,
                                    cfg.solver_cfg);
            break;
        case SolverKind::kkt:
            boundary = region_sweep(cfg.channels[0], cfg.channels[1], cfg.p_t,
                                    cfg.alpha_grid, SolverStrategy::kkt,
                                    cfg.solver_cfg);
            break;
        case SolverKind::full_csit:
            boundary = full_csit_region(cfg.channels[0], cfg.channels[1], cfg.p_t,
                                        cfg.alpha_grid, cfg.solver_cfg);
            break;
        case SolverKind::time_sharing:
            boundary = time_sharing_region(cfg.channels[0], cfg.channels[1],
                                           cfg.p_t, cfg.ts_grid, cfg.solver_cfg);
            break;
        case SolverKind::low_snr:
            boundary =
                low_snr_region(effective_second_moment(cfg.channels[0]),
                               effective_second_moment(cfg.channels[1]), cfg.p_t,
                               cfg.alpha_grid);
            break;
        case SolverKind::weighted:
            boundary = weighted_region(cfg);
            break;
    }

    if (cfg.format == OutputFormat::csv) {
        write_file(cfg.output_path, region_csv(boundary, cfg.solver, cfg.nats));
    } else {
        json out = region_json(boundary, cfg.solver, cfg.nats);
        out["meta"] = sidecar_json(cfg, "region", boundary.points.size());
        write_file(cfg.output_path, out.dump(2) + "\n");
    }
    write_file(cfg.output_path + ".meta.json",
               sidecar_json(cfg, "region", boundary.points.size()).dump(2) + "\n");
    std::cout << "region: " << boundary.points.size() << " points, "
              << boundary.hull.size() << " hull vertices -> " << cfg.output_path
              << "\n";
    return kExitOk;
}

int cmd_lowsnr(const CommonArgs& args) {
    RunConfig cfg = resolve(args);
    if (cfg.output_path == "region.csv") cfg.output_path = "lowsnr.json";
    const LowSnrSummary summary =
        energy_penalties(cfg.channels[0], cfg.channels[1], cfg.solver_cfg);
    json out = lowsnr_json(summary, cfg);

    if (args.validate) {
        // Slope check at vanishing power: Monte Carlo rate / P against the
        // closed-form asymptote along the optimal directions, b = 0.
        const double p = 1e-3;
        const ComplexMatrix m1 = effective_second_moment(cfg.channels[0]);
        const ComplexMatrix m2 = effective_second_moment(cfg.channels[1]);
        json blocks = json::array();
        bool all_ok = true;
        std::size_t idx = 0;
        for (double alpha : {0.25, 0.5, 0.75}) {
            const InputFactor t1(std::sqrt(alpha * p) * summary.direction1);
            const InputFactor t2(std::sqrt((1.0 - alpha) * p) * summary.direction2);
            SolverConfig local = cfg.solver_cfg;
            local.seed = derive_seed(cfg.solver_cfg.seed, 900 + idx++);
            const RatePair pair = rate_pair_statistical(
                t1, t2, InflationFactor::zero(t1.rank(), t1.dim()),
                Order::dpc_user1, alpha, cfg.channels[0], cfg.channels[1], local);
            const double closed =
                alpha * p * summary.lambda_max_12 / std::numbers::ln2;
            const double rel =
                closed > 0.0 ? std::abs(pair.r1 - closed) / closed : 0.0;
            const bool ok = rel <= 0.05;
            all_ok = all_ok && ok;
            blocks.push_back({{"alpha", alpha},
                              {"p", p},
                              {"mc_rate", pair.r1},
                              {"closed_form", closed},
                              {"relative_error", rel},
                              {"pass", ok}});
        }
        out["slope_validation"] = {{"pass", all_ok}, {"checks", blocks}};
    }

    write_file(cfg.output_path, out.dump(2) + "\n");
    std::cout << "lowsnr: verdict " << to_string(summary.verdict) << " -> "
              << cfg.output_path << "\n";
    return kExitOk;
}

int cmd_converge(const CommonArgs& args) {
    RunConfig cfg = resolve(args);
    if (cfg.output_path == "region.csv") cfg.output_path = "trace.jsonl";
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw ConfigError("converge needs an interior alpha in the config");
    const KktResult res =
        kkt_alternating_optimize(cfg.channels[0], cfg.channels[1], cfg.alpha,
                                 cfg.p_t, cfg.solver_cfg);
    write_file(cfg.output_path, trace_jsonl(res.trace, cfg.nats));
    std::cout << "converge: " << (res.trace.converged ? "converged" : "stopped")
              << " after " << res.trace.iterations << " outer iterations -> "
              << cfg.output_path << "\n";
    return kExitOk;
}

int cmd_degrade_check(const CommonArgs& args) {
    const RunConfig cfg = resolve(args);
    const ComplexMatrix& k1 = cfg.channels[0].cov;
    const ComplexMatrix& k2 = cfg.channels[1].cov;
    const ScaledDecision sd = is_scaled_pair(k1, k2);
    const PositivityVerdict verdict = low_snr_positivity(
        effective_second_moment(cfg.channels[0]),
        effective_second_moment(cfg.channels[1]));

    std::string line;
    if (sd.scaled) {
        line = "scaled(c=" + format_sig9(sd.ratio) + "); degraded";
    } else {
        line = "not scaled; low-SNR ";
        switch (verdict) {
            case PositivityVerdict::both_positive: line += "both-positive"; break;
            case PositivityVerdict::only_user1: line += "only-user1"; break;
            case PositivityVerdict::only_user2: line += "only-user2"; break;
            case PositivityVerdict::neither: line += "neither"; break;
        }
    }
    std::cout << line << "\n";
    if (!args.output.empty()) {
        json out;
        out["scaled"] = sd.scaled;
        if (sd.scaled) out["scale_ratio"] = sd.ratio;
        out["verdict"] = to_string(verdict);
        out["line"] = line;
        out["config_digest"] = cfg.digest;
        write_file(args.output, out.dump(2) + "\n");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secrecy rate regions for the two-user fading MISO broadcast "
                 "channel with confidential messages under statistical CSIT"};
    app.require_subcommand(1);

    CommonArgs region_args, lowsnr_args, converge_args, degrade_args;
    CLI::App* region = app.add_subcommand(
        "region", "sweep the power-split grid and emit the region frontier");
    add_common(region, region_args);
    CLI::App* lowsnr = app.add_subcommand(
        "lowsnr", "vanishing-power summary: eigenvalues, bit energies, verdict");
    add_common(lowsnr, lowsnr_args);
    lowsnr->add_flag("--validate", lowsnr_args.validate,
                     "run the Monte Carlo slope check");
    CLI::App* converge = app.add_subcommand(
        "converge", "run the alternating optimizer and dump its trace");
    add_common(converge, converge_args);
    CLI::App* degrade = app.add_subcommand(
        "degrade-check", "report the scaled-pair and positivity verdicts");
    add_common(degrade, degrade_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (region->parsed()) return cmd_region(region_args);
        if (lowsnr->parsed()) return cmd_lowsnr(lowsnr_args);
        if (converge->parsed()) return cmd_converge(converge_args);
        if (degrade->parsed()) return cmd_degrade_check(degrade_args);
    } catch (const ConfigError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const SolverDiverged& e) {
        std::cerr << "solver failure: " << e.what() << " (alpha="
                  << format_sig9(e.alpha) << ", order=" << e.order_tag << ")\n";
        return kExitSolverFailure;
    } catch (const Error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    return kExitInputError;
}
