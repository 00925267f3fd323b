#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rlmc/model.hpp"
#include "rlmc/rng.hpp"

namespace rlmc {

// A single per-time sampling distribution on the domain box: uniform, or a
// per-coordinate (independent) Gaussian truncated to the box.
struct MeasureComponent {
  enum class Kind { uniform_box, truncated_gaussian };

  Kind kind = Kind::uniform_box;
  std::vector<Interval> box;
  std::vector<double> mean;  // truncated_gaussian only
  std::vector<double> sd;    // truncated_gaussian only
  bool sd_floored = false;   // set by fit_schedule when the sd floor engaged

  static MeasureComponent uniform(std::vector<Interval> box);
  static MeasureComponent truncated_gaussian(std::vector<double> mean,
                                             std::vector<double> sd,
                                             std::vector<Interval> box);

  int dimension() const { return static_cast<int>(box.size()); }
  void validate() const;

  // Normalized density w.r.t. Lebesgue measure on the box.
  double density(std::span<const double> x) const;
  void sample(rng::Stream& stream, std::span<double> out) const;

  // Marginal CDF along one coordinate (used by distribution tests).
  double marginal_cdf(int dim, double x) const;
};

// Training measure: a single component used at every time, or a schedule of
// per-time components for times 1..N. Layer 0 is never regressed, so a
// schedule reuses its time-1 component there.
class TrainingMeasure {
 public:
  static TrainingMeasure single(MeasureComponent component);
  static TrainingMeasure uniform(std::vector<Interval> box);
  static TrainingMeasure truncated_gaussian(std::vector<double> mean,
                                            std::vector<double> sd,
                                            std::vector<Interval> box);
  static TrainingMeasure schedule(std::vector<MeasureComponent> components);

  bool is_schedule() const { return is_schedule_; }
  int schedule_length() const { return static_cast<int>(components_.size()); }
  const MeasureComponent& component(int n) const;
  const std::vector<MeasureComponent>& components() const { return components_; }
  const std::vector<Interval>& box() const { return components_.front().box; }
  int dimension() const { return components_.front().dimension(); }

 private:
  TrainingMeasure() = default;
  std::vector<MeasureComponent> components_;
  bool is_schedule_ = false;
};

// M i.i.d. draws from the layer-n distribution, flattened M x d. The stream
// is keyed by (seed, layer n), so layers are independent and each call is
// reproducible.
std::vector<double> sample_layer(const TrainingMeasure& measure, int n, int count,
                                 std::uint64_t seed);

double density(const TrainingMeasure& measure, int n, std::span<const double> x);

inline constexpr double kRBarInfinity = std::numeric_limits<double>::infinity();

struct RBarGrid {
  int x_points = 201;
  int u_points = 201;
  int y_points = 201;
  int time_stride = 1;  // evaluate every time_stride-th decision epoch
};

// Grid supremum of transition-density / training-density ratios over
// (n, x, u, y): an estimate of R_bar^2, reported as its square root.
// Returns +infinity when the ratio leaves the floating-point range (or the
// training density vanishes where the transition density does not).
double estimate_r_bar(const ControlledModel& model, const TrainingMeasure& measure,
                      const RBarGrid& grid = {});

// Supremum over the grid of d(mu_n)/d(reference): the factor by which a
// time-dependent measure inflates the error-propagation constant.
double schedule_density_ratio_factor(const TrainingMeasure& schedule,
                                     const MeasureComponent& reference,
                                     int grid_points = 201);

// Fits a per-time truncated Gaussian schedule to simulated trajectories
// (flattened M x (N+1) x d, time-major within each trajectory). Components
// are fitted for times 1..N; the sd is floored at sd_floor_frac of the box
// half-width per coordinate.
TrainingMeasure fit_schedule(std::span<const double> trajectories, int paths,
                             int num_steps, int dim,
                             const std::vector<Interval>& box,
                             double sd_floor_frac = 0.05);

}  // namespace rlmc
