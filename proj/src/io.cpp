#include "fmgbc/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fmgbc/linalg.hpp"

namespace fmgbc {

using nlohmann::json;

std::string format_sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace {

// Round-trip through the fixed output precision so JSON numbers match the
// documented 9-significant-digit contract and stay byte-stable.
double sig9(double v) { return std::strtod(format_sig9(v).c_str(), nullptr); }

json eb_json(const std::optional<double>& v) {
    if (v) return sig9(*v);
    return "unreachable";
}

double out_rate(double bits, bool nats) {
    return nats ? bits * std::numbers::ln2 : bits;
}

}  // namespace

std::string digest_of(const json& canonical) {
    const std::string dump = canonical.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json complex_to_json(const Complex& z) { return json::array({sig9(z.real()), sig9(z.imag())}); }

json vector_to_json(const ComplexVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
    return out;
}

json matrix_to_json(const ComplexMatrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(complex_to_json(m(r, c)));
        out.push_back(row);
    }
    return out;
}

Complex complex_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(where + ": complex entries must be [re, im]");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

ComplexVector vector_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array");
    ComplexVector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] =
            complex_from_json(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw ConfigError(where + ": expected a non-empty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    ComplexMatrix m;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array())
            throw ConfigError(where + ": row " + std::to_string(r) + " is not an array");
        if (r == 0) {
            cols = j[r].size();
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (j[r].size() != cols) {
            throw ConfigError(where + ": ragged rows");
        }
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex_from_json(j[r][c], where + "[" + std::to_string(r) + "][" +
                                               std::to_string(c) + "]");
    }
    return m;
}

namespace {

std::vector<double> linspace(double start, double stop, int steps) {
    if (steps < 2) return {start};
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        out.push_back(start + (stop - start) * i / (steps - 1));
    return out;
}

SolverKind solver_from_string(const std::string& s) {
    if (s == "beamformer_fixedpoint") return SolverKind::beamformer_fixedpoint;
    if (s == "kkt") return SolverKind::kkt;
    if (s == "full_csit") return SolverKind::full_csit;
    if (s == "time_sharing") return SolverKind::time_sharing;
    if (s == "low_snr") return SolverKind::low_snr;
    if (s == "weighted") return SolverKind::weighted;
    throw ConfigError("unknown solver '" + s + "'");
}

}  // namespace

const char* solver_kind_name(SolverKind k) {
    switch (k) {
        case SolverKind::beamformer_fixedpoint: return "beamformer_fixedpoint";
        case SolverKind::kkt: return "kkt";
        case SolverKind::full_csit: return "full_csit";
        case SolverKind::time_sharing: return "time_sharing";
        case SolverKind::low_snr: return "low_snr";
        case SolverKind::weighted: return "weighted";
    }
    return "unknown";
}

RunConfig parse_run_config(const json& j, const CliOverrides& overrides) {
    RunConfig cfg;
    if (!j.is_object()) throw ConfigError("config root must be an object");

    cfg.p_t = j.value("p_t", 10.0);
    if (!(cfg.p_t > 0.0)) throw ConfigError("p_t must be positive");
    cfg.noise_var = j.value("noise_var", 1.0);
    if (!(cfg.noise_var > 0.0)) throw ConfigError("noise_var must be positive");

    if (!j.contains("channels") || !j["channels"].is_array() ||
        j["channels"].size() != 2)
        throw ConfigError("config needs exactly two entries under 'channels'");
    for (int i = 0; i < 2; ++i) {
        const json& cj = j["channels"][i];
        const std::string where = "channels[" + std::to_string(i) + "]";
        if (!cj.is_object() || !cj.contains("cov"))
            throw ConfigError(where + " must be an object with a 'cov' matrix");
        ComplexMatrix cov = matrix_from_json(cj["cov"], where + ".cov");
        ComplexVector mean = cj.contains("mean")
                                 ? vector_from_json(cj["mean"], where + ".mean")
                                 : ComplexVector::Zero(cov.rows());
        // Prescale to unit noise so the rate formulas keep their form.
        cov /= cfg.noise_var;
        mean /= std::sqrt(cfg.noise_var);
        try {
            cfg.channels.emplace_back(std::move(mean), std::move(cov));
        } catch (const Error& e) {
            throw ConfigError(where + ".cov: " + e.what());
        }
    }
    if (cfg.channels[0].dim() != cfg.channels[1].dim())
        throw ConfigError("the two channels differ in dimension");

    cfg.n_t = j.value("n_t", static_cast<int>(cfg.channels[0].dim()));
    if (static_cast<Eigen::Index>(cfg.n_t) != cfg.channels[0].dim())
        throw ConfigError("n_t does not match the channel dimension");

    if (j.contains("alpha_grid")) {
        const json& ag = j["alpha_grid"];
        if (ag.is_array()) {
            for (const auto& v : ag) cfg.alpha_grid.push_back(v.get<double>());
        } else if (ag.is_object()) {
            cfg.alpha_grid = linspace(ag.value("start", 0.0), ag.value("stop", 1.0),
                                      ag.value("steps", 21));
        } else {
            throw ConfigError("alpha_grid must be an array or {start, stop, steps}");
        }
    } else {
        cfg.alpha_grid = linspace(0.0, 1.0, 21);
    }
    for (double a : cfg.alpha_grid)
        if (!(a >= 0.0 && a <= 1.0))
            throw ConfigError("alpha_grid values must lie in [0, 1]");

    cfg.solver = solver_from_string(j.value("solver", "beamformer_fixedpoint"));

    if (j.contains("solver_cfg")) {
        const json& sc = j["solver_cfg"];
        cfg.solver_cfg.samples = sc.value("samples", cfg.solver_cfg.samples);
        cfg.solver_cfg.seed = sc.value("seed", cfg.solver_cfg.seed);
        cfg.solver_cfg.delta = sc.value("delta", cfg.solver_cfg.delta);
        cfg.solver_cfg.eps1 = sc.value("eps1", cfg.solver_cfg.eps1);
        cfg.solver_cfg.eps2 = sc.value("eps2", cfg.solver_cfg.eps2);
        cfg.solver_cfg.eps3 = sc.value("eps3", cfg.solver_cfg.eps3);
        cfg.solver_cfg.max_outer = sc.value("max_outer", cfg.solver_cfg.max_outer);
        cfg.solver_cfg.max_inner = sc.value("max_inner", cfg.solver_cfg.max_inner);
        cfg.solver_cfg.damping = sc.value("damping", cfg.solver_cfg.damping);
        const std::string init = sc.value("init", "random");
        if (init == "random")
            cfg.solver_cfg.init = InitMode::random;
        else if (init == "warm")
            cfg.solver_cfg.init = InitMode::warm;
        else
            throw ConfigError("solver_cfg.init must be 'random' or 'warm'");
    }

    if (j.contains("output")) {
        cfg.output_path = j["output"].value("path", cfg.output_path);
        const std::string f = j["output"].value("format", "csv");
        if (f == "csv")
            cfg.format = OutputFormat::csv;
        else if (f == "json")
            cfg.format = OutputFormat::json;
        else
            throw ConfigError("output.format must be 'csv' or 'json'");
    }

    cfg.alpha = j.value("alpha", 0.5);
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
        throw ConfigError("alpha must lie in [0, 1]");

    if (j.contains("mu_grid")) {
        for (const auto& v : j["mu_grid"]) cfg.mu_grid.push_back(v.get<double>());
    } else {
        cfg.mu_grid = {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 1e6};
    }

    if (j.contains("time_sharing_grid")) {
        cfg.ts_grid.tau_steps = j["time_sharing_grid"].value("tau_steps", 21);
        cfg.ts_grid.power_steps = j["time_sharing_grid"].value("power_steps", 21);
    }

    // Overrides participate in the digest: it identifies the effective run.
    if (overrides.samples) {
        if (*overrides.samples < 1) throw ConfigError("--samples must be positive");
        cfg.solver_cfg.samples = *overrides.samples;
    }
    if (overrides.seed) cfg.solver_cfg.seed = *overrides.seed;
    if (overrides.alpha_steps) {
        if (*overrides.alpha_steps < 2)
            throw ConfigError("--alpha-steps must be at least 2");
        cfg.alpha_grid = linspace(0.0, 1.0, *overrides.alpha_steps);
    }
    if (overrides.output) cfg.output_path = *overrides.output;
    if (overrides.format) {
        if (*overrides.format == "csv")
            cfg.format = OutputFormat::csv;
        else if (*overrides.format == "json")
            cfg.format = OutputFormat::json;
        else
            throw ConfigError("--format must be 'csv' or 'json'");
    }
    cfg.nats = overrides.nats;

    json canonical;
    canonical["p_t"] = cfg.p_t;
    canonical["noise_var"] = cfg.noise_var;
    canonical["n_t"] = cfg.n_t;
    canonical["alpha"] = cfg.alpha;
    canonical["alpha_grid"] = cfg.alpha_grid;
    canonical["mu_grid"] = cfg.mu_grid;
    canonical["solver"] = solver_kind_name(cfg.solver);
    canonical["samples"] = static_cast<long long>(cfg.solver_cfg.samples);
    canonical["seed"] = cfg.solver_cfg.seed;
    canonical["delta"] = cfg.solver_cfg.delta;
    canonical["eps"] = {cfg.solver_cfg.eps1, cfg.solver_cfg.eps2,
                        cfg.solver_cfg.eps3};
    canonical["max_outer"] = cfg.solver_cfg.max_outer;
    canonical["max_inner"] = cfg.solver_cfg.max_inner;
    canonical["damping"] = cfg.solver_cfg.damping;
    canonical["init"] = cfg.solver_cfg.init == InitMode::warm ? "warm" : "random";
    canonical["nats"] = cfg.nats;
    canonical["tau_steps"] = cfg.ts_grid.tau_steps;
    canonical["power_steps"] = cfg.ts_grid.power_steps;
    json chans = json::array();
    for (const ChannelStatistics& c : cfg.channels)
        chans.push_back({{"mean", vector_to_json(c.mean)},
                         {"cov", matrix_to_json(c.cov)}});
    canonical["channels"] = chans;
    cfg.digest = digest_of(canonical);
    return cfg;
}

RunConfig load_run_config(const std::string& path, const CliOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_run_config(j, overrides);
}

std::string order_label(const RatePair& p) {
    switch (p.kind) {
        case PointKind::axis: return "axis";
        case PointKind::time_share: return "ts";
        case PointKind::closed_form: return "na";
        case PointKind::swept: break;
    }
    return p.order == Order::dpc_user1 ? "12" : "21";
}

namespace {

void append_point_csv(std::string& out, const RatePair& p, SolverKind solver,
                      bool nats) {
    out += format_sig9(p.alpha);
    out += ',';
    out += order_label(p);
    out += ',';
    out += format_sig9(out_rate(p.r1, nats));
    out += ',';
    out += format_sig9(out_rate(p.r2, nats));
    out += ',';
    out += format_sig9(out_rate(p.std_err[0], nats));
    out += ',';
    out += format_sig9(out_rate(p.std_err[1], nats));
    out += ',';
    out += solver_kind_name(solver);
    out += ',';
    out += std::to_string(p.iterations);
    out += '\n';
}

json point_json(const RatePair& p, bool nats) {
    return {{"alpha", sig9(p.alpha)},
            {"order", order_label(p)},
            {"r1", sig9(out_rate(p.r1, nats))},
            {"r2", sig9(out_rate(p.r2, nats))},
            {"r1_stderr", sig9(out_rate(p.std_err[0], nats))},
            {"r2_stderr", sig9(out_rate(p.std_err[1], nats))},
            {"iterations", p.iterations},
            {"converged", p.converged}};
}

}  // namespace

std::string region_csv(const RegionBoundary& region, SolverKind solver,
                       bool nats) {
    std::string out = "alpha,order,R1,R2,R1_stderr,R2_stderr,solver,iterations\n";
    for (const RatePair& p : region.hull) append_point_csv(out, p, solver, nats);
    return out;
}

json region_json(const RegionBoundary& region, SolverKind solver, bool nats) {
    json out;
    out["solver"] = solver_kind_name(solver);
    out["unit"] = nats ? "nats" : "bits";
    json hull = json::array();
    for (const RatePair& p : region.hull) hull.push_back(point_json(p, nats));
    out["hull"] = hull;
    json points = json::array();
    for (const RatePair& p : region.points) points.push_back(point_json(p, nats));
    out["points"] = points;
    return out;
}

json sidecar_json(const RunConfig& cfg, const char* command, std::size_t points) {
    json out;
    out["command"] = command;
    out["config_digest"] = cfg.digest;
    out["seed"] = cfg.solver_cfg.seed;
    out["samples"] = static_cast<long long>(cfg.solver_cfg.samples);
    out["solver"] = solver_kind_name(cfg.solver);
    out["p_t"] = sig9(cfg.p_t);
    out["n_t"] = cfg.n_t;
    out["noise_var"] = sig9(cfg.noise_var);
    out["unit"] = cfg.nats ? "nats" : "bits";
    out["points"] = points;
    return out;
}

json lowsnr_json(const LowSnrSummary& summary, const RunConfig& cfg) {
    json out;
    out["lambda_max_12"] = sig9(summary.lambda_max_12);
    out["lambda_max_21"] = sig9(summary.lambda_max_21);
    out["direction1"] = vector_to_json(summary.direction1);
    out["direction2"] = vector_to_json(summary.direction2);
    out["verdict"] = to_string(summary.verdict);
    out["rician_extension"] = summary.rician_extension;
    for (int j = 0; j < 2; ++j) {
        const std::string user = "user" + std::to_string(j + 1);
        out["eb_n0_secure_scsit"][user] = eb_json(summary.eb_secure_scsit[j]);
        out["eb_n0_nosecrecy"][user] = eb_json(summary.eb_nosecrecy[j]);
        out["eb_n0_secure_fcsit"][user] = eb_json(summary.eb_secure_fcsit[j]);
        out["eb_n0_secure_fcsit_stderr"][user] =
            sig9(summary.eb_secure_fcsit_std_err[j]);
        out["secrecy_penalty"][user] = eb_json(summary.secrecy_penalty[j]);
        out["secrecy_inequality_ok"][user] = summary.secrecy_inequality_ok[j];
        out["csit_inequality_ok"][user] = summary.csit_inequality_ok[j];
    }
    out["config_digest"] = cfg.digest;
    out["seed"] = cfg.solver_cfg.seed;
    out["samples"] = static_cast<long long>(cfg.solver_cfg.samples);
    return out;
}

std::string trace_jsonl(const SolverTrace& trace, bool nats) {
    std::string out;
    for (const TraceRecord& rec : trace.records) {
        json line;
        line["iteration"] = rec.iteration;
        line["r1"] = sig9(out_rate(rec.r1, nats));
        line["r2"] = sig9(out_rate(rec.r2, nats));
        line["lambda1"] = sig9(rec.lambda1);
        line["lambda2"] = sig9(rec.lambda2);
        line["b"] = matrix_to_json(rec.b);
        line["t1"] = matrix_to_json(rec.t1);
        line["t2"] = matrix_to_json(rec.t2);
        line["converged"] = trace.converged;
        out += line.dump();
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << contents;
    if (!out) throw ConfigError("failed writing output file '" + path + "'");
}

}  // namespace fmgbc
