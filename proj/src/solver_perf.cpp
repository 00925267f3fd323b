#include "rlmc/solver_perf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rlmc/parallel.hpp"
#include "rlmc/rng.hpp"

namespace rlmc {

namespace {

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

ControlOptimum control_map_from(const CoefficientMatrix& coefficients,
                                const CondExpEvaluator& evaluator,
                                const ControlledModel& model, int s,
                                std::span<const double> x,
                                const OptimizerConfig& optimizer) {
  if (s < 0 || s >= model.num_steps()) {
    throw ArgumentError("control_map_from: time index out of range");
  }
  return bellman_target(model, evaluator, s, x, coefficients.row_for_time(s + 1),
                        optimizer);
}

SolveResult solve_perf(const ControlledModel& model, const BasisFamily& basis,
                       const CondExpEvaluator& evaluator, const TrainingMeasure& measure,
                       const PerfSolveConfig& config) {
  config.validate();
  model.validate();
  if (basis.dim() != model.state_dim() || evaluator.size() != basis.size() ||
      measure.dimension() != model.state_dim()) {
    throw ConfigError("solve_perf: model/basis/evaluator/measure mismatch");
  }
  if (measure.is_schedule() && measure.schedule_length() < model.num_steps()) {
    throw ConfigError("solve_perf: schedule shorter than the horizon");
  }
  const auto start = std::chrono::steady_clock::now();

  const int N = model.num_steps();
  const int M = config.sample_count;
  const int K = basis.size();
  const int d = model.state_dim();
  const int nd = std::max(model.noise_dim, 1);

  SolveResult result;
  result.coefficients.rows.resize(N);
  result.coefficients.solver_kind = "performance";
  result.coefficients.master_seed = config.seed;
  result.coefficients.sample_count = M;
  result.coefficients.basis_size = K;
  result.diagnostics.solver_kind = "performance";
  result.diagnostics.truncation = 0.0;  // no truncation in performance iteration
  if (M < K) {
    result.diagnostics.warnings.push_back(
        "sample_count below basis size: regression is identifiable only "
        "through the exact Gram matrix and will be high-variance");
  }

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

  std::vector<double> points = sample_layer(measure, N, M, config.seed);
  std::vector<double> targets(M);
  for (int m = 0; m < M; ++m) {
    targets[m] = model.objective_terminal(
        std::span<const double>(points.data() + static_cast<std::size_t>(m) * d, d));
    if (!std::isfinite(targets[m])) {
      throw NumericalError("solve_perf: non-finite terminal value", N, m);
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
  const std::uint64_t resim_tag = static_cast<std::uint64_t>(rng::StreamTag::perf_resim);
  for (int n = N - 1; n >= 0; --n) {
    result.coefficients.rows[n] =
        project_mc(points, targets, basis, *layer_gram[n + 1], n + 1);

    new_points = sample_layer(measure, n, M, config.seed);
    parallel_for(M, config.threads, [&](long begin, long end) {
      std::vector<double> state(d), next(d), xi(nd);
      for (long m = begin; m < end; ++m) {
        std::copy_n(new_points.data() + static_cast<std::size_t>(m) * d, d,
                    state.begin());
        double performance = 0.0;
        long eval_count = 0;
        try {
          // Resimulate under the control maps induced by the future
          // coefficient rows; fresh independent noise per (n, m, s).
          for (int s = n; s < N; ++s) {
            const auto opt = bellman_target(model, evaluator, s, state,
                                            result.coefficients.rows[s].alpha,
                                            config.optimizer);
            eval_count += opt.evaluations;
            performance += model.objective_running(s, state, opt.control_span());
            for (int c = 0; c < nd; ++c) {
              xi[c] = rng::keyed_uniform({config.seed, resim_tag,
                                          static_cast<std::uint64_t>(n),
                                          static_cast<std::uint64_t>(m),
                                          static_cast<std::uint64_t>(s),
                                          static_cast<std::uint64_t>(c)});
            }
            model.dynamics(s, state, xi, opt.control_span(), next);
            model.state_domain.clamp(next);
            state.swap(next);
          }
          performance += model.objective_terminal(state);
        } catch (const NumericalError& e) {
          throw NumericalError(std::string(e.what()) + " (time " + std::to_string(n) +
                                   ", sample " + std::to_string(m) + ")",
                               n, m);
        }
        new_targets[m] = performance;
        evals[m] = eval_count;
      }
    });
    for (int m = 0; m < M; ++m) {
      if (!std::isfinite(new_targets[m])) {
        throw NumericalError("solve_perf: non-finite pathwise performance", n, m);
      }
    }

    LayerDiagnostics diag;
    diag.time_index = n;
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
