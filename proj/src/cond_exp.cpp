#include "rlmc/cond_exp.hpp"

#include <algorithm>
#include <cmath>

#include "rlmc/normal.hpp"
#include "rlmc/quadrature.hpp"
#include "rlmc/rng.hpp"

namespace rlmc {

std::vector<double> cond_exp_basis(const CondExpEvaluator& evaluator, int n,
                                   std::span<const double> x,
                                   std::span<const double> u) {
  std::vector<double> out(evaluator.size());
  evaluator.eval(n, x, u, out);
  return out;
}

namespace {

void check_args(const ControlledModel& model, int n, std::span<const double> x,
                std::span<const double> u) {
  if (n < 0 || n >= model.num_steps()) {
    throw ArgumentError("cond_exp: time index out of range");
  }
  if (!model.state_domain.contains(x, 1e-9)) {
    throw ArgumentError("cond_exp: state outside domain");
  }
  if (!model.control_set.contains(u)) {
    throw ArgumentError("cond_exp: control outside control set");
  }
}

// Polynomial basis under X' = clamp(m + sd Z): phi_k-hat = sum_j c_kj E[X'^j].
// When the Gaussian sits at least 5 sd inside the box the clamp mass is
// negligible (< 3e-7) and raw Gaussian moments (pure arithmetic) are used;
// near a boundary the censored-normal moments take over.
class PolynomialClosedForm final : public CondExpEvaluator {
 public:
  PolynomialClosedForm(const ControlledModel& model, const BasisFamily& basis)
      : CondExpEvaluator(basis.size(), "closed_form"),
        model_(model),
        step_(*model.affine_gaussian),
        lo_(model.state_domain.bounds[0].lo),
        hi_(model.state_domain.bounds[0].hi),
        coefficients_(*basis.monomial_coefficients()) {
    max_degree_ = 0;
    for (const auto& c : coefficients_) {
      max_degree_ = std::max(max_degree_, static_cast<int>(c.size()) - 1);
    }
  }

  void eval(int n, std::span<const double> x, std::span<const double> u,
            std::span<double> out) const override {
    check_args(model_, n, x, u);
    const double mean = step_.mean(x[0], u[0]);
    const double sd = step_.sd;
    double moments[18];
    if (mean - 5.0 * sd >= lo_ && mean + 5.0 * sd <= hi_) {
      // Raw Gaussian moment recurrence M_j = mean M_{j-1} + (j-1) sd^2 M_{j-2}.
      moments[0] = 1.0;
      if (max_degree_ >= 1) moments[1] = mean;
      for (int j = 2; j <= max_degree_; ++j) {
        moments[j] = mean * moments[j - 1] + (j - 1) * sd * sd * moments[j - 2];
      }
    } else {
      normal::CensoredMoments cm(lo_, hi_, mean, sd);
      cm.eval(max_degree_, moments);
    }
    for (std::size_t k = 0; k < coefficients_.size(); ++k) {
      const auto& c = coefficients_[k];
      double v = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) v += c[j] * moments[j];
      out[k] = v;
    }
  }

 private:
  const ControlledModel& model_;
  AffineGaussianStep step_;
  double lo_, hi_;
  const std::vector<std::vector<double>>& coefficients_;
  int max_degree_;
};

// Piecewise-affine basis under the same dynamics: per-cell indicator masses
// and first moments from normal CDF differences, with the clamp atoms
// assigned to the boundary cells.
class PiecewiseAffineClosedForm final : public CondExpEvaluator {
 public:
  PiecewiseAffineClosedForm(const ControlledModel& model, const BasisFamily& basis)
      : CondExpEvaluator(basis.size(), "closed_form"),
        model_(model),
        step_(*model.affine_gaussian),
        lo_(model.state_domain.bounds[0].lo),
        hi_(model.state_domain.bounds[0].hi),
        cells_(*basis.partition_cells()) {
    // 1-d cells sorted by lower edge; shared edges give one CDF evaluation.
    order_.resize(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) order_[i] = static_cast<int>(i);
    std::sort(order_.begin(), order_.end(),
              [&](int a, int b) { return cells_[a][0].lo < cells_[b][0].lo; });
  }

  void eval(int n, std::span<const double> x, std::span<const double> u,
            std::span<double> out) const override {
    check_args(model_, n, x, u);
    const double mean = step_.mean(x[0], u[0]);
    const double sd = step_.sd;
    const double cdf_lo = normal::cdf((lo_ - mean) / sd);
    const double cdf_hi = normal::cdf((hi_ - mean) / sd);
    const double atom_lo = cdf_lo;
    const double atom_hi = 1.0 - cdf_hi;
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < order_.size(); ++r) {
      const int cell = order_[r];
      const auto& iv = cells_[cell][0];
      const double za = (iv.lo - mean) / sd;
      const double zb = (iv.hi - mean) / sd;
      const double ca = normal::cdf(za), cb = normal::cdf(zb);
      const double pa = normal::pdf(za), pb = normal::pdf(zb);
      double mass = std::max(cb - ca, 0.0);
      double weighted = mean * mass + sd * (pa - pb);
      if (r == 0) {  // clamp atom at the lower bound
        mass += atom_lo;
        weighted += lo_ * atom_lo;
      }
      if (r + 1 == order_.size()) {  // clamp atom at the upper bound
        mass += atom_hi;
        weighted += hi_ * atom_hi;
      }
      out[cell * 2] = mass;
      out[cell * 2 + 1] = weighted;
    }
  }

 private:
  const ControlledModel& model_;
  AffineGaussianStep step_;
  double lo_, hi_;
  const std::vector<std::vector<Interval>>& cells_;
  std::vector<int> order_;
};

class GaussHermiteEvaluator final : public CondExpEvaluator {
 public:
  GaussHermiteEvaluator(const ControlledModel& model, const BasisFamily& basis, int order)
      : CondExpEvaluator(basis.size(), "gauss_hermite(" + std::to_string(order) + ")"),
        model_(model),
        basis_(basis),
        step_(*model.affine_gaussian),
        lo_(model.state_domain.bounds[0].lo),
        hi_(model.state_domain.bounds[0].hi) {
    quad::gauss_hermite(order, nodes_, weights_);
  }

  void eval(int n, std::span<const double> x, std::span<const double> u,
            std::span<double> out) const override {
    check_args(model_, n, x, u);
    const double mean = step_.mean(x[0], u[0]);
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> phi(size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      double y = mean + step_.sd * nodes_[j];
      y = std::min(std::max(y, lo_), hi_);
      basis_.eval(std::span<const double>(&y, 1), phi);
      for (int k = 0; k < size(); ++k) out[k] += weights_[j] * phi[k];
    }
  }

 private:
  const ControlledModel& model_;
  const BasisFamily& basis_;
  AffineGaussianStep step_;
  double lo_, hi_;
  std::vector<double> nodes_, weights_;
};

class InnerMonteCarloEvaluator final : public CondExpEvaluator {
 public:
  InnerMonteCarloEvaluator(const ControlledModel& model, const BasisFamily& basis,
                           int samples, std::uint64_t seed)
      : CondExpEvaluator(basis.size(),
                         "inner_monte_carlo(" + std::to_string(samples) + ")"),
        model_(model),
        basis_(basis),
        samples_(samples) {
    if (samples < 1) throw ConfigError("inner_monte_carlo: samples must be >= 1");
    rng::Stream stream(
        rng::derive({seed, static_cast<std::uint64_t>(rng::StreamTag::inner_mc)}));
    noise_.resize(static_cast<std::size_t>(samples) * std::max(model.noise_dim, 1));
    for (double& v : noise_) v = stream.next_uniform();
  }

  void eval(int n, std::span<const double> x, std::span<const double> u,
            std::span<double> out) const override {
    check_args(model_, n, x, u);
    const int d = model_.state_dim();
    const int nd = model_.noise_dim;
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> next(d);
    std::vector<double> phi(size());
    for (int s = 0; s < samples_; ++s) {
      model_.dynamics(n, x,
                      std::span<const double>(noise_.data() + static_cast<std::size_t>(s) * nd,
                                              static_cast<std::size_t>(nd)),
                      u, next);
      model_.state_domain.clamp(next);
      basis_.eval(next, phi);
      for (int k = 0; k < size(); ++k) out[k] += phi[k];
    }
    const double inv = 1.0 / samples_;
    for (int k = 0; k < size(); ++k) out[k] *= inv;
  }

 private:
  const ControlledModel& model_;
  const BasisFamily& basis_;
  int samples_;
  std::vector<double> noise_;
};

}  // namespace

std::unique_ptr<CondExpEvaluator> make_closed_form_evaluator(const ControlledModel& model,
                                                             const BasisFamily& basis) {
  if (!model.affine_gaussian || model.state_dim() != 1) {
    throw ConfigError(
        "closed_form cond-exp needs 1-d affine-Gaussian dynamics; "
        "select gauss_hermite or inner_monte_carlo instead");
  }
  if (basis.monomial_coefficients()) {
    return std::make_unique<PolynomialClosedForm>(model, basis);
  }
  if (basis.kind() == BasisKind::piecewise_affine && basis.dim() == 1) {
    return std::make_unique<PiecewiseAffineClosedForm>(model, basis);
  }
  throw ConfigError("closed_form cond-exp unsupported for basis kind " +
                    to_string(basis.kind()) + "; select a fallback strategy");
}

std::unique_ptr<CondExpEvaluator> make_gauss_hermite_evaluator(
    const ControlledModel& model, const BasisFamily& basis, int order) {
  if (!model.affine_gaussian || model.state_dim() != 1) {
    throw ConfigError(
        "gauss_hermite cond-exp needs 1-d affine-Gaussian dynamics; "
        "select inner_monte_carlo instead");
  }
  if (order < 1) throw ConfigError("gauss_hermite: order must be >= 1");
  return std::make_unique<GaussHermiteEvaluator>(model, basis, order);
}

std::unique_ptr<CondExpEvaluator> make_inner_mc_evaluator(const ControlledModel& model,
                                                          const BasisFamily& basis,
                                                          int samples,
                                                          std::uint64_t seed) {
  return std::make_unique<InnerMonteCarloEvaluator>(model, basis, samples, seed);
}

std::unique_ptr<CondExpEvaluator> make_default_evaluator(const ControlledModel& model,
                                                         const BasisFamily& basis,
                                                         std::uint64_t seed) {
  try {
    return make_closed_form_evaluator(model, basis);
  } catch (const ConfigError&) {
  }
  try {
    return make_gauss_hermite_evaluator(model, basis);
  } catch (const ConfigError&) {
  }
  return make_inner_mc_evaluator(model, basis, 512, seed);
}

}  // namespace rlmc
