#include "rlmc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rlmc/normal.hpp"

namespace rlmc {

MeasureComponent MeasureComponent::uniform(std::vector<Interval> box) {
  MeasureComponent c;
  c.kind = Kind::uniform_box;
  c.box = std::move(box);
  c.validate();
  return c;
}

MeasureComponent MeasureComponent::truncated_gaussian(std::vector<double> mean,
                                                      std::vector<double> sd,
                                                      std::vector<Interval> box) {
  MeasureComponent c;
  c.kind = Kind::truncated_gaussian;
  c.box = std::move(box);
  c.mean = std::move(mean);
  c.sd = std::move(sd);
  c.validate();
  return c;
}

void MeasureComponent::validate() const {
  if (box.empty()) throw ConfigError("MeasureComponent: empty box");
  for (const auto& b : box) {
    if (!(b.lo < b.hi)) throw ConfigError("MeasureComponent: requires lo < hi");
  }
  if (kind == Kind::truncated_gaussian) {
    if (mean.size() != box.size() || sd.size() != box.size()) {
      throw ConfigError("MeasureComponent: mean/sd size must match box dimension");
    }
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (!(sd[i] > 0.0)) throw ConfigError("MeasureComponent: sd must be > 0");
      const double za = (box[i].lo - mean[i]) / sd[i];
      const double zb = (box[i].hi - mean[i]) / sd[i];
      if (!(normal::cdf(zb) - normal::cdf(za) > 0.0)) {
        throw ConfigError(
            "MeasureComponent: truncated Gaussian has no mass on the box");
      }
    }
  }
}

double MeasureComponent::density(std::span<const double> x) const {
  if (x.size() != box.size()) {
    throw ArgumentError("MeasureComponent::density: dimension mismatch");
  }
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!box[i].contains(x[i])) {
      throw ArgumentError("MeasureComponent::density: point outside the box");
    }
  }
  if (kind == Kind::uniform_box) {
    double v = 1.0;
    for (const auto& b : box) v *= b.width();
    return 1.0 / v;
  }
  double d = 1.0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double za = (box[i].lo - mean[i]) / sd[i];
    const double zb = (box[i].hi - mean[i]) / sd[i];
    const double mass = normal::cdf(zb) - normal::cdf(za);
    d *= normal::pdf((x[i] - mean[i]) / sd[i]) / (sd[i] * mass);
  }
  return d;
}

void MeasureComponent::sample(rng::Stream& stream, std::span<double> out) const {
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double u = stream.next_uniform();
    if (kind == Kind::uniform_box) {
      out[i] = box[i].lo + u * box[i].width();
    } else {
      const double ca = normal::cdf((box[i].lo - mean[i]) / sd[i]);
      const double cb = normal::cdf((box[i].hi - mean[i]) / sd[i]);
      double p = ca + u * (cb - ca);
      p = std::min(std::max(p, std::numeric_limits<double>::min()),
                   1.0 - std::numeric_limits<double>::epsilon() / 2);
      out[i] = box[i].clamp(mean[i] + sd[i] * normal::quantile(p));
    }
  }
}

double MeasureComponent::marginal_cdf(int dim, double x) const {
  const auto& b = box.at(dim);
  if (x <= b.lo) return 0.0;
  if (x >= b.hi) return 1.0;
  if (kind == Kind::uniform_box) return (x - b.lo) / b.width();
  const double ca = normal::cdf((b.lo - mean[dim]) / sd[dim]);
  const double cb = normal::cdf((b.hi - mean[dim]) / sd[dim]);
  return (normal::cdf((x - mean[dim]) / sd[dim]) - ca) / (cb - ca);
}

TrainingMeasure TrainingMeasure::single(MeasureComponent component) {
  component.validate();
  TrainingMeasure m;
  m.components_.push_back(std::move(component));
  m.is_schedule_ = false;
  return m;
}

TrainingMeasure TrainingMeasure::uniform(std::vector<Interval> box) {
  return single(MeasureComponent::uniform(std::move(box)));
}

TrainingMeasure TrainingMeasure::truncated_gaussian(std::vector<double> mean,
                                                    std::vector<double> sd,
                                                    std::vector<Interval> box) {
  return single(
      MeasureComponent::truncated_gaussian(std::move(mean), std::move(sd), std::move(box)));
}

TrainingMeasure TrainingMeasure::schedule(std::vector<MeasureComponent> components) {
  if (components.empty()) throw ConfigError("TrainingMeasure: empty schedule");
  for (auto& c : components) c.validate();
  for (const auto& c : components) {
    if (c.dimension() != components.front().dimension()) {
      throw ConfigError("TrainingMeasure: schedule components disagree on dimension");
    }
  }
  TrainingMeasure m;
  m.components_ = std::move(components);
  m.is_schedule_ = true;
  return m;
}

const MeasureComponent& TrainingMeasure::component(int n) const {
  if (!is_schedule_) return components_.front();
  // Schedule components cover times 1..N; layer 0 reuses the time-1 entry.
  const int idx = std::clamp(n, 1, schedule_length()) - 1;
  return components_[static_cast<std::size_t>(idx)];
}

std::vector<double> sample_layer(const TrainingMeasure& measure, int n, int count,
                                 std::uint64_t seed) {
  if (count < 1) throw ArgumentError("sample_layer: count must be >= 1");
  const auto& comp = measure.component(n);
  const int d = comp.dimension();
  std::vector<double> out(static_cast<std::size_t>(count) * d);
  rng::Stream stream(rng::derive(
      {seed, static_cast<std::uint64_t>(rng::StreamTag::training_layer),
       static_cast<std::uint64_t>(n)}));
  for (int m = 0; m < count; ++m) {
    comp.sample(stream, std::span<double>(out.data() + static_cast<std::size_t>(m) * d,
                                          static_cast<std::size_t>(d)));
  }
  return out;
}

double density(const TrainingMeasure& measure, int n, std::span<const double> x) {
  return measure.component(n).density(x);
}

namespace {

std::vector<double> linspace(const Interval& iv, int points) {
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) {
    v[i] = iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / (points - 1);
  }
  return v;
}

}  // namespace

double estimate_r_bar(const ControlledModel& model, const TrainingMeasure& measure,
                      const RBarGrid& grid) {
  if (!model.transition_density) {
    throw CapabilityError("estimate_r_bar: model does not expose a transition density");
  }
  if (model.state_dim() != 1 || model.control_dim() != 1) {
    throw CapabilityError("estimate_r_bar: grid diagnostic implemented for 1-d models");
  }
  const auto& density_fn = *model.transition_density;
  const auto xs = linspace(model.state_domain.bounds[0], grid.x_points);
  const auto us = linspace(model.control_set.bounds[0], grid.u_points);
  const auto ys = linspace(measure.box()[0], grid.y_points);

  double sup = 0.0;
  std::vector<double> mu_density(ys.size());
  for (int n = 0; n < model.num_steps(); n += std::max(grid.time_stride, 1)) {
    const auto& comp = measure.component(n + 1);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      mu_density[j] = comp.density(std::span<const double>(&ys[j], 1));
    }
    for (double x : xs) {
      for (double u : us) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
          const double p = density_fn(n, std::span<const double>(&x, 1),
                                      std::span<const double>(&u, 1),
                                      std::span<const double>(&ys[j], 1));
          if (p <= 0.0) continue;
          if (mu_density[j] <= 0.0) return kRBarInfinity;
          const double ratio = p / mu_density[j];
          if (!std::isfinite(ratio)) return kRBarInfinity;
          sup = std::max(sup, ratio);
        }
      }
    }
  }
  return std::sqrt(sup);
}

double schedule_density_ratio_factor(const TrainingMeasure& schedule,
                                     const MeasureComponent& reference,
                                     int grid_points) {
  if (schedule.dimension() != 1) {
    throw CapabilityError("schedule_density_ratio_factor: 1-d grids only");
  }
  const auto ys = linspace(schedule.box()[0], grid_points);
  double sup = 0.0;
  for (const auto& comp : schedule.components()) {
    for (double y : ys) {
      const std::span<const double> pt(&y, 1);
      const double num = comp.density(pt);
      const double den = reference.density(pt);
      if (den <= 0.0) return kRBarInfinity;
      sup = std::max(sup, num / den);
    }
  }
  return sup;
}

TrainingMeasure fit_schedule(std::span<const double> trajectories, int paths,
                             int num_steps, int dim,
                             const std::vector<Interval>& box,
                             double sd_floor_frac) {
  if (paths < 1) throw ArgumentError("fit_schedule: needs at least one trajectory");
  const std::size_t expected =
      static_cast<std::size_t>(paths) * (num_steps + 1) * dim;
  if (trajectories.size() != expected) {
    throw ArgumentError("fit_schedule: trajectory buffer size mismatch");
  }
  if (static_cast<int>(box.size()) != dim) {
    throw ArgumentError("fit_schedule: box dimension mismatch");
  }

  std::vector<MeasureComponent> components;
  components.reserve(num_steps);
  const std::size_t row = static_cast<std::size_t>(num_steps + 1) * dim;
  for (int n = 1; n <= num_steps; ++n) {
    std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
    bool floored = false;
    for (int c = 0; c < dim; ++c) {
      double sum = 0.0, sum_sq = 0.0;
      for (int m = 0; m < paths; ++m) {
        const double v = trajectories[m * row + static_cast<std::size_t>(n) * dim + c];
        if (!box[c].contains(v, 1e-9)) {
          throw ArgumentError("fit_schedule: trajectory leaves the box at time " +
                              std::to_string(n));
        }
        sum += v;
        sum_sq += v * v;
      }
      mean[c] = sum / paths;
      const double var = std::max(sum_sq / paths - mean[c] * mean[c], 0.0);
      const double floor = sd_floor_frac * 0.5 * box[c].width();
      sd[c] = std::sqrt(var);
      if (sd[c] < floor) {
        sd[c] = floor;
        floored = true;
      }
    }
    auto comp = MeasureComponent::truncated_gaussian(std::move(mean), std::move(sd), box);
    comp.sd_floored = floored;
    components.push_back(std::move(comp));
  }
  return TrainingMeasure::schedule(std::move(components));
}

}  // namespace rlmc
