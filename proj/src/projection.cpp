#include "rlmc/projection.hpp"

#include <cmath>

#include "rlmc/quadrature.hpp"

namespace rlmc {

const Eigen::VectorXd& CoefficientMatrix::row_for_time(int n) const {
  if (n < 1 || n > num_steps()) {
    throw ArgumentError("CoefficientMatrix: time index " + std::to_string(n) +
                        " outside [1, " + std::to_string(num_steps()) + "]");
  }
  return rows[static_cast<std::size_t>(n - 1)].alpha;
}

CoefficientVector project_mc(std::span<const double> points,
                             std::span<const double> values,
                             const BasisFamily& basis, const GramMatrix& gram,
                             int time_index) {
  const int d = basis.dim();
  const int K = basis.size();
  if (values.empty()) throw ArgumentError("project_mc: needs at least one sample");
  if (points.size() != values.size() * static_cast<std::size_t>(d)) {
    throw ArgumentError("project_mc: points/values size mismatch");
  }
  if (gram.size() != K) throw ArgumentError("project_mc: gram size mismatch");

  const long M = static_cast<long>(values.size());
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(K);
  std::vector<double> phi(K);
  for (long m = 0; m < M; ++m) {
    const double v = values[m];
    if (!std::isfinite(v)) {
      throw DataError("project_mc: non-finite regression target at index " +
                          std::to_string(m),
                      m);
    }
    basis.eval(points.subspan(static_cast<std::size_t>(m) * d, d), phi);
    for (int k = 0; k < K; ++k) moment(k) += v * phi[k];
  }
  moment /= static_cast<double>(M);

  CoefficientVector result;
  result.alpha = gram.apply_inverse(moment);
  result.sample_count = static_cast<int>(M);
  result.time_index = time_index;
  return result;
}

namespace {

quad::QuadratureOptions projection_quadrature_options(int dim) {
  quad::QuadratureOptions options;
  options.rel_tol = 1e-8;
  options.order = 16;
  options.max_panels = dim == 1 ? 32768 : 128;
  return options;
}

}  // namespace

CoefficientVector project_exact(const std::function<double(std::span<const double>)>& h,
                                const BasisFamily& basis,
                                const MeasureComponent& component,
                                const GramMatrix& gram) {
  const int K = basis.size();
  if (gram.size() != K) throw ArgumentError("project_exact: gram size mismatch");
  std::vector<double> phi(K);
  auto integrand = [&](std::span<const double> x, std::span<double> out) {
    basis.eval(x, phi);
    const double hw = h(x) * component.density(x);
    for (int k = 0; k < K; ++k) out[k] = hw * phi[k];
  };
  const auto result =
      quad::integrate(K, integrand, std::span<const Interval>(component.box),
                      projection_quadrature_options(basis.dim()));
  Eigen::VectorXd moment = result.value;

  CoefficientVector out;
  out.alpha = gram.apply_inverse(moment);
  out.sample_count = 0;
  out.time_index = 0;
  return out;
}

CoefficientVector project_exact(const std::function<double(std::span<const double>)>& h,
                                const BasisFamily& basis, const TrainingMeasure& measure,
                                const GramMatrix& gram) {
  return project_exact(h, basis, measure.component(1), gram);
}

double projection_error(const std::function<double(std::span<const double>)>& h,
                        const BasisFamily& basis, const MeasureComponent& component,
                        const GramMatrix& gram) {
  const auto coeffs = project_exact(h, basis, component, gram);
  const int K = basis.size();
  std::vector<double> phi(K);
  auto integrand = [&](std::span<const double> x) {
    basis.eval(x, phi);
    double fit = 0.0;
    for (int k = 0; k < K; ++k) fit += coeffs.alpha(k) * phi[k];
    const double r = h(x) - fit;
    return r * r * component.density(x);
  };
  const double sq =
      quad::integrate_scalar(integrand, std::span<const Interval>(component.box),
                             projection_quadrature_options(basis.dim()));
  return std::sqrt(std::max(sq, 0.0));
}

double projection_error(const std::function<double(std::span<const double>)>& h,
                        const BasisFamily& basis, const TrainingMeasure& measure,
                        const GramMatrix& gram) {
  return projection_error(h, basis, measure.component(1), gram);
}

}  // namespace rlmc
