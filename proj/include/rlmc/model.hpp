#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rlmc/errors.hpp"

namespace rlmc {

struct TimeGrid {
  int num_steps = 1;                  // N: decision epochs 0..N-1, states 0..N
  std::optional<double> horizon;      // physical time T for time-discretized problems

  void validate() const {
    if (num_steps < 1) throw ArgumentError("TimeGrid: num_steps must be >= 1");
    if (horizon && *horizon <= 0.0) throw ArgumentError("TimeGrid: horizon must be > 0");
  }
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x, double tol = 0.0) const {
    return x >= lo - tol && x <= hi + tol;
  }
  double clamp(double x) const { return std::min(std::max(x, lo), hi); }
};

// Compact box the state lives in. Dynamics output is clamped into the box,
// which realizes the truncation that keeps transition densities bounded.
struct StateDomain {
  std::vector<Interval> bounds;

  int dimension() const { return static_cast<int>(bounds.size()); }

  void validate() const {
    if (bounds.empty()) throw ArgumentError("StateDomain: dimension must be >= 1");
    for (const auto& b : bounds) {
      if (!(b.lo < b.hi)) throw ArgumentError("StateDomain: requires lo < hi");
      if (!std::isfinite(b.lo) || !std::isfinite(b.hi)) {
        throw ArgumentError("StateDomain: bounds must be finite");
      }
    }
  }

  bool contains(std::span<const double> x, double tol = 0.0) const {
    if (x.size() != bounds.size()) return false;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      if (!bounds[i].contains(x[i], tol)) return false;
    }
    return true;
  }

  void clamp(std::span<double> x) const {
    for (std::size_t i = 0; i < bounds.size(); ++i) x[i] = bounds[i].clamp(x[i]);
  }

  double volume() const {
    double v = 1.0;
    for (const auto& b : bounds) v *= b.width();
    return v;
  }
};

// Compact control box; an optional per-coordinate grid resolution declares a
// finite control set (the optimizer then searches exactly that grid).
struct ControlSet {
  std::vector<Interval> bounds;
  std::vector<int> grid_resolution;  // empty = continuous box

  int dimension() const { return static_cast<int>(bounds.size()); }

  void validate() const {
    if (bounds.empty()) throw ArgumentError("ControlSet: dimension must be >= 1");
    for (const auto& b : bounds) {
      if (!(b.lo <= b.hi)) throw ArgumentError("ControlSet: requires lo <= hi");
      if (!std::isfinite(b.lo) || !std::isfinite(b.hi)) {
        throw ArgumentError("ControlSet: bounds must be finite (compact set)");
      }
    }
    if (!grid_resolution.empty()) {
      if (grid_resolution.size() != bounds.size()) {
        throw ArgumentError("ControlSet: grid resolution size must match dimension");
      }
      for (int r : grid_resolution) {
        if (r < 2) throw ArgumentError("ControlSet: grid resolution must be >= 2");
      }
    }
  }

  bool contains(std::span<const double> u, double tol = 1e-12) const {
    if (u.size() != bounds.size()) return false;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      if (!bounds[i].contains(u[i], tol)) return false;
    }
    return true;
  }
};

enum class Sense { maximize, minimize };

// One-dimensional clamped affine-Gaussian transition:
//   X' = clamp(a0 + ax * x + au * u + sd * Z, domain),  Z ~ N(0,1).
// Models that fit this shape declare it so that conditional expectations of
// polynomial and piecewise-affine bases have closed forms.
struct AffineGaussianStep {
  double a0 = 0.0;
  double ax = 1.0;
  double au = 0.0;
  double sd = 1.0;

  double mean(double x, double u) const { return a0 + ax * x + au * u; }
};

// Controlled discrete-time Markov model: dynamics map, running and terminal
// rewards, and the declared bounds on both. Immutable after construction;
// all operations are pure.
class ControlledModel {
 public:
  using DynamicsFn = std::function<void(int n, std::span<const double> x,
                                        std::span<const double> xi,
                                        std::span<const double> u,
                                        std::span<double> out)>;
  using RunningRewardFn =
      std::function<double(int n, std::span<const double> x, std::span<const double> u)>;
  using TerminalRewardFn = std::function<double(std::span<const double> x)>;
  using TransitionDensityFn =
      std::function<double(int n, std::span<const double> x, std::span<const double> u,
                           std::span<const double> y)>;

  std::string name;
  TimeGrid time_grid;
  StateDomain state_domain;
  ControlSet control_set;
  int noise_dim = 1;
  DynamicsFn dynamics;                // pre-clamp map; step() clamps the output
  RunningRewardFn running_reward;     // f(n, x, u), in the declared sense
  TerminalRewardFn terminal_reward;   // g(x), in the declared sense
  double running_bound = 0.0;         // ||f||_inf
  double terminal_bound = 0.0;        // ||g||_inf
  Sense sense = Sense::maximize;
  std::optional<TransitionDensityFn> transition_density;
  std::optional<AffineGaussianStep> affine_gaussian;

  void validate() const;

  int num_steps() const { return time_grid.num_steps; }
  int state_dim() const { return state_domain.dimension(); }
  int control_dim() const { return control_set.dimension(); }

  // Solvers maximize internally; minimization problems are handled by
  // negating rewards here and un-negating reported values.
  double objective_sign() const { return sense == Sense::minimize ? -1.0 : 1.0; }
  double objective_running(int n, std::span<const double> x,
                           std::span<const double> u) const {
    return objective_sign() * running_reward(n, x, u);
  }
  double objective_terminal(std::span<const double> x) const {
    return objective_sign() * terminal_reward(x);
  }
};

// One transition of the controlled chain; the returned state is clamped into
// the state domain.
std::vector<double> step(const ControlledModel& model, int n,
                         std::span<const double> x, std::span<const double> xi,
                         std::span<const double> u);

// In-place variant used by the simulation loops: writes clamp(phi(n,x,xi,u))
// into out. Performs the same argument checks as step().
void step_into(const ControlledModel& model, int n, std::span<const double> x,
               std::span<const double> xi, std::span<const double> u,
               std::span<double> out);

// Pathwise performance sum_{s=n}^{N-1} f(s, x_s, u_s) + g(x_N) for a path
// segment starting at time n: states x_n..x_N, controls u_n..u_{N-1}.
// States and controls are stored flat, one row per time point.
double pathwise_performance(const ControlledModel& model, int n,
                            std::span<const double> states,
                            std::span<const double> controls);

// Trivial value bound Gamma_bar = (N-1)||f||_inf + ||g||_inf, the default
// truncation level for value iteration.
double value_bound(const ControlledModel& model);

}  // namespace rlmc
