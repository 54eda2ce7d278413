#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fmgbc/channel.hpp"
#include "fmgbc/lowsnr.hpp"
#include "fmgbc/region.hpp"
#include "fmgbc/solver.hpp"
#include "fmgbc/solver_config.hpp"

namespace fmgbc {

enum class SolverKind {
    beamformer_fixedpoint,
    kkt,
    full_csit,
    time_sharing,
    low_snr,
    weighted
};

enum class OutputFormat { csv, json };

/// Resolved run configuration. Channel statistics are already prescaled to
/// unit noise (K / noise_var, mu / sqrt(noise_var)).
struct RunConfig {
    int n_t = 2;
    double p_t = 10.0;
    double noise_var = 1.0;  // as given in the config
    std::vector<ChannelStatistics> channels;
    std::vector<double> alpha_grid;
    SolverKind solver = SolverKind::beamformer_fixedpoint;
    SolverConfig solver_cfg;
    std::string output_path = "region.csv";
    OutputFormat format = OutputFormat::csv;
    double alpha = 0.5;           // converge command
    std::vector<double> mu_grid;  // weighted solver
    TimeSharingGrid ts_grid;
    bool nats = false;  // report rates in nats instead of bits
    std::string digest;
};

struct CliOverrides {
    std::optional<long long> samples;
    std::optional<unsigned long long> seed;
    std::optional<int> alpha_steps;
    std::optional<std::string> output;
    std::optional<std::string> format;
    bool nats = false;
};

/// Parses and validates the JSON config; throws ConfigError with a message
/// naming the offending field. Overrides are applied before the digest is
/// taken, so the digest identifies the effective run.
RunConfig load_run_config(const std::string& path, const CliOverrides& overrides);

RunConfig parse_run_config(const nlohmann::json& j, const CliOverrides& overrides);

/// FNV-1a 64 over a canonical dump of the resolved config, as 16 hex chars.
std::string digest_of(const nlohmann::json& canonical);

/// Fixed 9-significant-digit decimal formatting used in all outputs.
std::string format_sig9(double v);

nlohmann::json complex_to_json(const Complex& z);
nlohmann::json vector_to_json(const ComplexVector& v);
nlohmann::json matrix_to_json(const ComplexMatrix& m);
Complex complex_from_json(const nlohmann::json& j, const std::string& where);
ComplexVector vector_from_json(const nlohmann::json& j, const std::string& where);
ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& where);

std::string order_label(const RatePair& p);
const char* solver_kind_name(SolverKind k);

/// CSV rows: alpha,order,R1,R2,R1_stderr,R2_stderr,solver,iterations.
std::string region_csv(const RegionBoundary& region, SolverKind solver,
                       bool nats);
nlohmann::json region_json(const RegionBoundary& region, SolverKind solver,
                           bool nats);
nlohmann::json sidecar_json(const RunConfig& cfg, const char* command,
                            std::size_t points);
nlohmann::json lowsnr_json(const LowSnrSummary& summary, const RunConfig& cfg);
std::string trace_jsonl(const SolverTrace& trace, bool nats);

void write_file(const std::string& path, const std::string& contents);

}  // namespace fmgbc
