#include "rlmc/quadrature.hpp"

#include <cmath>
#include <string>

#include "rlmc/errors.hpp"

namespace rlmc::quad {

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw ArgumentError("gauss_legendre: order must be >= 1");
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess, then Newton on P_order.
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) nodes[order / 2] = 0.0;
}

void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw ArgumentError("gauss_hermite: order must be >= 1");
  // Jacobi matrix of the probabilists' Hermite polynomials: zero diagonal,
  // off-diagonal sqrt(k).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  if (es.info() != Eigen::Success) {
    throw NumericalError("gauss_hermite: eigen decomposition failed");
  }
  nodes.resize(order);
  weights.resize(order);
  for (int i = 0; i < order; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = v0 * v0;  // total mass of N(0,1) is 1
  }
}

namespace {

// One composite-level pass: `panels` panels per dimension, tensor GL rule.
void accumulate_level(
    int output_dim,
    const std::function<void(std::span<const double>, std::span<double>)>& f,
    std::span<const Interval> box, int panels, int order, Eigen::VectorXd& total,
    long& evals) {
  const int dim = static_cast<int>(box.size());
  std::vector<double> gl_nodes, gl_weights;
  gauss_legendre(order, gl_nodes, gl_weights);

  // Per-dimension flattened node/weight arrays over all panels.
  std::vector<std::vector<double>> axis_nodes(dim), axis_weights(dim);
  for (int d = 0; d < dim; ++d) {
    const double w = box[d].width() / panels;
    axis_nodes[d].reserve(static_cast<std::size_t>(panels) * order);
    axis_weights[d].reserve(static_cast<std::size_t>(panels) * order);
    for (int p = 0; p < panels; ++p) {
      const double lo = box[d].lo + p * w;
      const double mid = lo + 0.5 * w;
      for (int j = 0; j < order; ++j) {
        axis_nodes[d].push_back(mid + 0.5 * w * gl_nodes[j]);
        axis_weights[d].push_back(0.5 * w * gl_weights[j]);
      }
    }
  }

  total.setZero(output_dim);
  std::vector<double> x(dim);
  Eigen::VectorXd fx(output_dim);
  std::vector<std::size_t> idx(dim, 0);
  const std::size_t per_axis = axis_nodes[0].size();
  std::size_t count = 1;
  for (int d = 0; d < dim; ++d) count *= axis_nodes[d].size();
  for (std::size_t flat = 0; flat < count; ++flat) {
    std::size_t rem = flat;
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      const std::size_t i = rem % per_axis;
      rem /= per_axis;
      x[d] = axis_nodes[d][i];
      w *= axis_weights[d][i];
    }
    f(x, std::span<double>(fx.data(), output_dim));
    total.noalias() += w * fx;
    ++evals;
  }
}

}  // namespace

QuadratureResult integrate(
    int output_dim,
    const std::function<void(std::span<const double>, std::span<double>)>& f,
    std::span<const Interval> box, const QuadratureOptions& options) {
  if (box.empty()) throw ArgumentError("integrate: box must have dimension >= 1");
  if (output_dim < 1) throw ArgumentError("integrate: output_dim must be >= 1");

  QuadratureResult result;
  Eigen::VectorXd prev;
  for (int panels = 1; panels <= options.max_panels; panels *= 2) {
    Eigen::VectorXd current;
    accumulate_level(output_dim, f, box, panels, options.order, current, result.nodes);
    if (prev.size() > 0) {
      const double scale = std::max(current.cwiseAbs().maxCoeff(), 1e-300);
      const double diff = (current - prev).cwiseAbs().maxCoeff();
      if (diff <= options.rel_tol * scale) {
        result.value = current;
        result.panels = panels;
        result.converged = true;
        return result;
      }
    }
    prev = std::move(current);
    result.panels = panels;
  }
  throw NumericalError(
      "integrate: quadrature did not converge to rel_tol " +
      std::to_string(options.rel_tol) + " within " +
      std::to_string(options.max_panels) + " panels per dimension");
}

double integrate_scalar(const std::function<double(std::span<const double>)>& f,
                        std::span<const Interval> box,
                        const QuadratureOptions& options) {
  auto wrapped = [&f](std::span<const double> x, std::span<double> out) {
    out[0] = f(x);
  };
  return integrate(1, wrapped, box, options).value(0);
}

}  // namespace rlmc::quad
