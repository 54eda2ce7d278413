#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace fmgbc {

enum class InitMode { random, warm };

/// Sampling and stopping knobs shared by the rate evaluator and the solvers.
struct SolverConfig {
    Eigen::Index samples = 100000;  // per expectation
    std::uint64_t seed = 1;
    double delta = 1e-3;  // outer stop on rate change (max-abs)
    double eps1 = 1e-3;   // inner inflation-factor stop
    double eps2 = 1e-3;   // inner first-factor stop
    double eps3 = 1e-3;   // inner second-factor stop
    int max_outer = 50;
    int max_inner = 200;
    double damping = 0.5;               // moving-average weight on the new iterate
    InitMode init = InitMode::random;   // alternating-solver start
};

}  // namespace fmgbc
