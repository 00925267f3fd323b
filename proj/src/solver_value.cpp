#include "rlmc/solver_value.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rlmc/parallel.hpp"

namespace rlmc {

namespace {

void check_consistency(const ControlledModel& model, const BasisFamily& basis,
                       const CondExpEvaluator& evaluator,
                       const TrainingMeasure& measure) {
  model.validate();
  if (basis.dim() != model.state_dim()) {
    throw ConfigError("solver: basis dimension does not match the model");
  }
  if (evaluator.size() != basis.size()) {
    throw ConfigError("solver: evaluator size does not match the basis");
  }
  if (measure.dimension() != model.state_dim()) {
    throw ConfigError("solver: measure dimension does not match the model");
  }
  if (measure.is_schedule() && measure.schedule_length() < model.num_steps()) {
    throw ConfigError("solver: schedule shorter than the horizon");
  }
}

double variance(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

}  // namespace

ControlOptimum bellman_target(const ControlledModel& model,
                              const CondExpEvaluator& evaluator, int n,
                              std::span<const double> x,
                              const Eigen::VectorXd& alpha_next,
                              const OptimizerConfig& optimizer) {
  const int K = evaluator.size();
  double phihat_buf[64];
  std::vector<double> phihat_heap;
  std::span<double> phihat;
  if (K <= 64) {
    phihat = std::span<double>(phihat_buf, static_cast<std::size_t>(K));
  } else {
    phihat_heap.resize(K);
    phihat = phihat_heap;
  }
  return maximize_control(
      model.control_set, optimizer, [&](std::span<const double> u) {
        evaluator.eval(n, x, u, phihat);
        double cont = 0.0;
        for (int k = 0; k < K; ++k) cont += alpha_next(k) * phihat[k];
        return model.objective_running(n, x, u) + cont;
      });
}

SolveResult solve_value(const ControlledModel& model, const BasisFamily& basis,
                        const CondExpEvaluator& evaluator, const TrainingMeasure& measure,
                        const ValueSolveConfig& config) {
  config.validate();
  check_consistency(model, basis, evaluator, measure);
  const auto start = std::chrono::steady_clock::now();

  const int N = model.num_steps();
  const int M = config.sample_count;
  const int K = basis.size();
  const int d = model.state_dim();
  const double gamma = config.truncation > 0.0 ? config.truncation : value_bound(model);

  SolveResult result;
  result.coefficients.rows.resize(N);
  result.coefficients.solver_kind = "value";
  result.coefficients.master_seed = config.seed;
  result.coefficients.sample_count = M;
  result.coefficients.basis_size = K;
  result.diagnostics.solver_kind = "value";
  result.diagnostics.truncation = gamma;
  if (M < K) {
    result.diagnostics.warnings.push_back(
        "sample_count below basis size: regression is identifiable only "
        "through the exact Gram matrix and will be high-variance");
  }

  // Gram matrices per layer time; a single (non-schedule) measure shares one.
  std::vector<const GramMatrix*> layer_gram(N + 1, nullptr);
  std::vector<GramMatrix> gram_store;
  gram_store.reserve(measure.is_schedule() ? N : 1);
  if (measure.is_schedule()) {
    for (int n = 1; n <= N; ++n) gram_store.push_back(gram_matrix(basis, measure, n));
    for (int n = 1; n <= N; ++n) layer_gram[n] = &gram_store[n - 1];
  } else {
    gram_store.push_back(gram_matrix(basis, measure, 1));
    for (int n = 1; n <= N; ++n) layer_gram[n] = &gram_store[0];
  }

  // Layer N: terminal condition on fresh training points.
  std::vector<double> points = sample_layer(measure, N, M, config.seed);
  std::vector<double> targets(M);
  for (int m = 0; m < M; ++m) {
    targets[m] = model.objective_terminal(
        std::span<const double>(points.data() + static_cast<std::size_t>(m) * d, d));
    if (!std::isfinite(targets[m])) {
      throw NumericalError("solve_value: non-finite terminal value", N, m);
    }
  }
  {
    LayerDiagnostics diag;
    diag.time_index = N;
    diag.value_min = *std::min_element(targets.begin(), targets.end());
    diag.value_max = *std::max_element(targets.begin(), targets.end());
    diag.target_variance = variance(targets);
    result.diagnostics.layers.push_back(diag);
  }

  std::vector<double> new_points, new_targets(M);
  std::vector<long> evals(M);
  std::vector<char> truncated(M);
  for (int n = N - 1; n >= 0; --n) {
    result.coefficients.rows[n] =
        project_mc(points, targets, basis, *layer_gram[n + 1], n + 1);
    const Eigen::VectorXd& alpha = result.coefficients.rows[n].alpha;

    new_points = sample_layer(measure, n, M, config.seed);
    parallel_for(M, config.threads, [&](long begin, long end) {
      for (long m = begin; m < end; ++m) {
        const std::span<const double> x(
            new_points.data() + static_cast<std::size_t>(m) * d, d);
        try {
          const auto opt =
              bellman_target(model, evaluator, n, x, alpha, config.optimizer);
          evals[m] = opt.evaluations;
          const double v = opt.value;
          truncated[m] = (v > gamma || v < -gamma) ? 1 : 0;
          new_targets[m] = std::clamp(v, -gamma, gamma);
        } catch (const NumericalError& e) {
          throw NumericalError(std::string(e.what()) + " (time " + std::to_string(n) +
                                   ", sample " + std::to_string(m) + ")",
                               n, m);
        }
      }
    });
    for (int m = 0; m < M; ++m) {
      if (!std::isfinite(new_targets[m])) {
        throw NumericalError("solve_value: non-finite backward target", n, m);
      }
    }

    LayerDiagnostics diag;
    diag.time_index = n;
    diag.truncation_fraction =
        static_cast<double>(std::count(truncated.begin(), truncated.end(), 1)) / M;
    diag.value_min = *std::min_element(new_targets.begin(), new_targets.end());
    diag.value_max = *std::max_element(new_targets.begin(), new_targets.end());
    diag.target_variance = variance(new_targets);
    for (long e : evals) diag.optimizer_evaluations += e;
    result.diagnostics.layers.push_back(diag);

    points.swap(new_points);
    targets.swap(new_targets);
  }

  std::sort(result.diagnostics.layers.begin(), result.diagnostics.layers.end(),
            [](const LayerDiagnostics& a, const LayerDiagnostics& b) {
              return a.time_index < b.time_index;
            });
  double mean0 = 0.0;
  for (double v : targets) mean0 += v;
  result.diagnostics.value0_mean = mean0 / M;
  result.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace rlmc
