#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rlmc/cond_exp.hpp"
#include "rlmc/measures.hpp"
#include "rlmc/optimize.hpp"
#include "rlmc/projection.hpp"

namespace rlmc {

struct ValueSolveConfig {
  int sample_count = 1000;   // M: training points per layer
  double truncation = 0.0;   // Gamma; 0 selects value_bound(model)
  OptimizerConfig optimizer;
  std::uint64_t seed = 1;
  int threads = 1;           // 0 = hardware concurrency

  void validate() const {
    if (sample_count < 1) throw ConfigError("solver: sample_count must be >= 1");
    if (truncation < 0.0) throw ConfigError("solver: truncation must be >= 0");
    optimizer.validate();
  }
};

struct LayerDiagnostics {
  int time_index = 0;            // layer n on which targets were computed
  double truncation_fraction = 0.0;
  double value_min = 0.0;
  double value_max = 0.0;
  double target_variance = 0.0;  // across the layer's M targets
  long optimizer_evaluations = 0;
};

struct SolveDiagnostics {
  std::string solver_kind;
  double truncation = 0.0;       // Gamma actually used (internal sense)
  double wall_seconds = 0.0;
  std::vector<LayerDiagnostics> layers;  // ascending time index
  std::vector<std::string> warnings;
  // Values V-hat(0, x) on the final layer, internal (maximization) sense.
  double value0_mean = 0.0;
};

struct SolveResult {
  CoefficientMatrix coefficients;
  SolveDiagnostics diagnostics;
};

// Regress-later value iteration: backward recursion with Monte Carlo
// projection of the value estimates and truncation at Gamma. Coefficients are
// in the internal maximization sense (minimization problems are solved on
// negated rewards).
SolveResult solve_value(const ControlledModel& model, const BasisFamily& basis,
                        const CondExpEvaluator& evaluator, const TrainingMeasure& measure,
                        const ValueSolveConfig& config);

// One backward target: value and maximizer of
//   f(n, x, u) + sum_k alpha_next_k phihat_k(n, x, u)
// over the control set, pre-truncation, internal sense.
ControlOptimum bellman_target(const ControlledModel& model,
                              const CondExpEvaluator& evaluator, int n,
                              std::span<const double> x,
                              const Eigen::VectorXd& alpha_next,
                              const OptimizerConfig& optimizer);

}  // namespace rlmc
