#include "rlmc/model.hpp"

#include <cmath>

namespace rlmc {

void ControlledModel::validate() const {
  time_grid.validate();
  state_domain.validate();
  control_set.validate();
  if (noise_dim < 0) throw ArgumentError("ControlledModel: noise_dim must be >= 0");
  if (!dynamics) throw ArgumentError("ControlledModel: dynamics not set");
  if (!running_reward) throw ArgumentError("ControlledModel: running_reward not set");
  if (!terminal_reward) throw ArgumentError("ControlledModel: terminal_reward not set");
  if (running_bound < 0.0 || terminal_bound < 0.0) {
    throw ArgumentError("ControlledModel: reward bounds must be nonnegative");
  }
}

static void check_step_args(const ControlledModel& model, int n,
                            std::span<const double> x, std::span<const double> xi,
                            std::span<const double> u) {
  if (n < 0 || n >= model.num_steps()) {
    throw ArgumentError("step: time index " + std::to_string(n) +
                        " outside [0, " + std::to_string(model.num_steps() - 1) + "]");
  }
  if (static_cast<int>(x.size()) != model.state_dim()) {
    throw ArgumentError("step: state dimension mismatch");
  }
  if (static_cast<int>(xi.size()) != model.noise_dim) {
    throw ArgumentError("step: noise dimension mismatch");
  }
  if (!model.control_set.contains(u)) {
    throw ArgumentError("step: control outside the control set");
  }
  for (double c : xi) {
    if (!(c > 0.0 && c < 1.0)) {
      throw ArgumentError("step: noise components must lie strictly in (0,1)");
    }
  }
}

void step_into(const ControlledModel& model, int n, std::span<const double> x,
               std::span<const double> xi, std::span<const double> u,
               std::span<double> out) {
  check_step_args(model, n, x, xi, u);
  model.dynamics(n, x, xi, u, out);
  model.state_domain.clamp(out);
}

std::vector<double> step(const ControlledModel& model, int n,
                         std::span<const double> x, std::span<const double> xi,
                         std::span<const double> u) {
  std::vector<double> out(model.state_dim());
  step_into(model, n, x, xi, u, out);
  return out;
}

double pathwise_performance(const ControlledModel& model, int n,
                            std::span<const double> states,
                            std::span<const double> controls) {
  const int d = model.state_dim();
  const int q = model.control_dim();
  const int N = model.num_steps();
  if (n < 0 || n > N) throw ArgumentError("pathwise_performance: bad time index");
  const int horizon = N - n;
  if (static_cast<int>(states.size()) != (horizon + 1) * d) {
    throw ArgumentError("pathwise_performance: expected " +
                        std::to_string(horizon + 1) + " states");
  }
  if (static_cast<int>(controls.size()) != horizon * q) {
    throw ArgumentError("pathwise_performance: expected " +
                        std::to_string(horizon) + " controls");
  }
  double total = 0.0;
  for (int s = 0; s < horizon; ++s) {
    total += model.running_reward(n + s, states.subspan(s * d, d),
                                  controls.subspan(s * q, q));
  }
  total += model.terminal_reward(states.subspan(horizon * d, d));
  return total;
}

double value_bound(const ControlledModel& model) {
  return (model.num_steps() - 1) * model.running_bound + model.terminal_bound;
}

}  // namespace rlmc
