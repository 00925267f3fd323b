#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rlmc/solver_perf.hpp"

namespace rlmc {

struct Histogram {
  std::vector<double> edges;   // bin edges, size counts.size() + 1
  std::vector<long> counts;
};

struct EvaluationReport {
  double mean = 0.0;         // user-sense policy value (cost for minimization)
  double std_error = 0.0;
  int paths = 0;             // M'
  std::uint64_t seed = 0;
  std::vector<double> performances;  // user-sense pathwise values, one per path
  Histogram histogram;
  // Optional per-time state cross-sections, flattened M' x (N+1) x d.
  std::vector<double> cross_sections;
};

struct EvaluateOptions {
  bool keep_cross_sections = false;
  int histogram_bins = 0;  // 0 selects Freedman-Diaconis
  OptimizerConfig optimizer;
  int threads = 1;
};

// Forward Monte Carlo estimate of the value of the policy induced by the
// coefficient matrix: M' independent controlled paths from x0. Deterministic
// given the seed and independent of the thread count.
EvaluationReport evaluate_policy(const ControlledModel& model,
                                 const CoefficientMatrix& coefficients,
                                 const CondExpEvaluator& evaluator,
                                 std::span<const double> x0, int paths,
                                 std::uint64_t seed,
                                 const EvaluateOptions& options = {});

// Freedman-Diaconis by default; degenerate samples collapse to a single bin.
Histogram build_histogram(std::span<const double> values, int bins = 0);

}  // namespace rlmc
