#include <doctest.h>

#include <json.hpp>

#include "fmgbc/io.hpp"
#include "test_util.hpp"

using namespace fmgbc;
using nlohmann::json;

namespace {

json base_config() {
    return json::parse(R"({
      "n_t": 2,
      "p_t": 10.0,
      "noise_var": 1.0,
      "channels": [
        {"mean": [[0.0,0.0],[0.0,0.0]],
         "cov": [[[0.2,0.0],[0.0,0.0]],[[0.0,0.0],[0.04,0.0]]]},
        {"mean": [[0.0,0.0],[0.0,0.0]],
         "cov": [[[0.1,0.0],[0.08,0.0]],[[0.08,0.0],[0.1,0.0]]]}
      ],
      "alpha_grid": {"start": 0.0, "stop": 1.0, "steps": 5},
      "solver": "beamformer_fixedpoint",
      "solver_cfg": {"samples": 1000, "seed": 7},
      "output": {"path": "out.csv", "format": "csv"}
    })");
}

}  // namespace

TEST_CASE("config parsing resolves fields and grids") {
    const RunConfig cfg = parse_run_config(base_config(), {});
    CHECK(cfg.n_t == 2);
    CHECK(cfg.p_t == 10.0);
    CHECK(cfg.alpha_grid.size() == 5);
    CHECK(cfg.alpha_grid[1] == doctest::Approx(0.25));
    CHECK(cfg.solver == SolverKind::beamformer_fixedpoint);
    CHECK(cfg.solver_cfg.samples == 1000);
    CHECK(cfg.solver_cfg.seed == 7);
    CHECK(cfg.solver_cfg.delta == 1e-3);
    CHECK(cfg.output_path == "out.csv");
    CHECK(max_abs(cfg.channels[0].cov - testing::example_cov1()) == 0.0);
    CHECK(cfg.digest.size() == 16);
}

TEST_CASE("noise variance prescales the statistics") {
    json j = base_config();
    j["noise_var"] = 4.0;
    j["channels"][0]["mean"] = json::array({json::array({0.7, 0.0}),
                                            json::array({0.1, 0.0})});
    const RunConfig cfg = parse_run_config(j, {});
    CHECK(max_abs(cfg.channels[0].cov - testing::example_cov1() / 4.0) < 1e-15);
    CHECK(std::abs(cfg.channels[0].mean[0] - Complex(0.35, 0.0)) < 1e-15);
}

TEST_CASE("malformed covariance is rejected with a named field") {
    json j = base_config();
    j["channels"][1]["cov"] = json::parse("[[[1.0,0.0],[0.9,0.0]],[[0.9,0.0],[-0.5,0.0]]]");
    try {
        parse_run_config(j, {});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("channels[1]") != std::string::npos);
    }
}

TEST_CASE("ragged matrices and bad entries are rejected") {
    json j = base_config();
    j["channels"][0]["cov"] = json::parse("[[[1.0,0.0]],[[0.0,0.0],[1.0,0.0]]]");
    CHECK_THROWS_AS(parse_run_config(j, {}), ConfigError);
    j = base_config();
    j["solver"] = "unknown_solver";
    CHECK_THROWS_AS(parse_run_config(j, {}), ConfigError);
}

TEST_CASE("digest is stable and sensitive") {
    const RunConfig a = parse_run_config(base_config(), {});
    const RunConfig b = parse_run_config(base_config(), {});
    CHECK(a.digest == b.digest);
    json j = base_config();
    j["solver_cfg"]["seed"] = 8;
    const RunConfig c = parse_run_config(j, {});
    CHECK(a.digest != c.digest);
    CliOverrides ov;
    ov.seed = 8;
    const RunConfig d = parse_run_config(base_config(), ov);
    CHECK(d.digest == c.digest);  // overrides define the effective run
}

TEST_CASE("nine-significant-digit formatting") {
    CHECK(format_sig9(0.5) == "0.5");
    CHECK(format_sig9(1.0 / 3.0) == "0.333333333");
    CHECK(format_sig9(123456789012.0) == "1.23456789e+11");
}

TEST_CASE("complex values round trip through JSON") {
    const Complex z(0.25, -1.5);
    CHECK(complex_from_json(complex_to_json(z), "z") == z);
    ComplexMatrix m(2, 2);
    m << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(7, 8);
    CHECK(max_abs(matrix_from_json(matrix_to_json(m), "m") - m) == 0.0);
}

TEST_CASE("region CSV schema is fixed") {
    RegionBoundary region;
    RatePair p;
    p.r1 = 0.25;
    p.r2 = 0.5;
    p.alpha = 0.3;
    p.order = Order::dpc_user2;
    p.iterations = 4;
    region.points.push_back(p);
    region.hull.push_back(p);
    const std::string csv =
        region_csv(region, SolverKind::beamformer_fixedpoint, false);
    CHECK(csv.find("alpha,order,R1,R2,R1_stderr,R2_stderr,solver,iterations\n") ==
          0);
    CHECK(csv.find("0.3,21,0.25,0.5,0,0,beamformer_fixedpoint,4\n") !=
          std::string::npos);
    const std::string nats_csv =
        region_csv(region, SolverKind::beamformer_fixedpoint, true);
    CHECK(nats_csv.find("0.173286795") != std::string::npos);  // 0.25 * ln 2
}

TEST_CASE("order labels") {
    RatePair p;
    p.order = Order::dpc_user1;
    CHECK(order_label(p) == "12");
    p.order = Order::dpc_user2;
    CHECK(order_label(p) == "21");
    p.kind = PointKind::axis;
    CHECK(order_label(p) == "axis");
    p.kind = PointKind::time_share;
    CHECK(order_label(p) == "ts");
    p.kind = PointKind::closed_form;
    CHECK(order_label(p) == "na");
}
