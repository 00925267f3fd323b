#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>

#include "rlmc/errors.hpp"
#include "rlmc/model.hpp"

namespace rlmc {

inline constexpr int kMaxControlDim = 4;

struct OptimizerConfig {
  int grid_points = 33;     // per dimension, continuous control boxes
  int refine_rounds = 2;    // local refinements around the incumbent
  double refine_shrink = 4.0;

  void validate() const {
    if (grid_points < 2) throw ConfigError("optimizer: grid_points must be >= 2");
    if (refine_rounds < 0) throw ConfigError("optimizer: refine_rounds must be >= 0");
    if (refine_shrink <= 1.0) throw ConfigError("optimizer: refine_shrink must be > 1");
  }
};

struct ControlOptimum {
  double value = 0.0;
  std::array<double, kMaxControlDim> control{};
  int dim = 0;
  long evaluations = 0;

  std::span<const double> control_span() const {
    return std::span<const double>(control.data(), static_cast<std::size_t>(dim));
  }
};

namespace detail {

// Scans a per-dimension uniform grid in lexicographic order (first coordinate
// slowest), accepting strictly better objective values only. That realizes
// the tie-breaking rule: among equal maxima the lexicographically smallest
// control wins.
template <typename Objective>
void scan_grid(const std::array<double, kMaxControlDim>& lo,
               const std::array<double, kMaxControlDim>& step,
               const std::array<int, kMaxControlDim>& points, int dim,
               Objective&& objective, ControlOptimum& best) {
  std::array<int, kMaxControlDim> idx{};
  std::array<double, kMaxControlDim> u{};
  long total = 1;
  for (int d = 0; d < dim; ++d) total *= points[d];
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (int d = dim - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(rem % points[d]);
      rem /= points[d];
    }
    for (int d = 0; d < dim; ++d) u[d] = lo[d] + step[d] * idx[d];
    const double value =
        objective(std::span<const double>(u.data(), static_cast<std::size_t>(dim)));
    ++best.evaluations;
    if (std::isfinite(value) && value > best.value) {
      best.value = value;
      best.control = u;
    }
  }
}

}  // namespace detail

// Maximizes the objective over the control set. A declared discrete grid is
// searched exhaustively; a continuous box gets a uniform grid followed by
// shrinking local refinements around the incumbent. Deterministic.
template <typename Objective>
ControlOptimum maximize_control(const ControlSet& controls,
                                const OptimizerConfig& config, Objective&& objective) {
  const int dim = controls.dimension();
  if (dim > kMaxControlDim) {
    throw ConfigError("maximize_control: control dimension above " +
                      std::to_string(kMaxControlDim) + " unsupported");
  }

  ControlOptimum best;
  best.dim = dim;
  best.value = -std::numeric_limits<double>::infinity();

  std::array<double, kMaxControlDim> lo{}, step{};
  std::array<int, kMaxControlDim> points{};

  const bool discrete = !controls.grid_resolution.empty();
  for (int d = 0; d < dim; ++d) {
    const auto& b = controls.bounds[d];
    points[d] = discrete ? controls.grid_resolution[d] : config.grid_points;
    if (b.width() == 0.0) points[d] = 1;
    lo[d] = b.lo;
    step[d] = points[d] > 1 ? b.width() / (points[d] - 1) : 0.0;
  }
  detail::scan_grid(lo, step, points, dim, objective, best);

  if (!discrete) {
    for (int round = 1; round <= config.refine_rounds; ++round) {
      double shrink = 1.0;
      for (int r = 0; r < round; ++r) shrink *= config.refine_shrink;
      for (int d = 0; d < dim; ++d) {
        const auto& b = controls.bounds[d];
        const double half = 0.5 * b.width() / shrink;
        double wlo = std::max(best.control[d] - half, b.lo);
        double whi = std::min(best.control[d] + half, b.hi);
        points[d] = b.width() == 0.0 ? 1 : config.grid_points;
        lo[d] = wlo;
        step[d] = points[d] > 1 ? (whi - wlo) / (points[d] - 1) : 0.0;
      }
      detail::scan_grid(lo, step, points, dim, objective, best);
    }
  }

  if (!std::isfinite(best.value)) {
    throw NumericalError("maximize_control: all objective evaluations non-finite");
  }
  return best;
}

}  // namespace rlmc
