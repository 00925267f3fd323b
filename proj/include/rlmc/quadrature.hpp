#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rlmc/model.hpp"

namespace rlmc::quad {

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

// Gauss-Hermite rule for the standard normal weight: E[f(Z)] ~ sum w_i f(z_i)
// with Z ~ N(0,1). Computed by Golub-Welsch on the probabilists' Hermite
// recurrence, so any order is available.
void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights);

struct QuadratureOptions {
  double rel_tol = 1e-8;
  int order = 16;          // Gauss-Legendre order per panel
  int max_panels = 32768;  // per dimension; refinement doubles panel count
};

struct QuadratureResult {
  Eigen::VectorXd value;
  long nodes = 0;       // total integrand evaluations
  int panels = 0;       // panels per dimension at the accepted level
  bool converged = false;
};

// Adaptive composite tensor Gauss-Legendre integration of a vector-valued
// integrand over а box. Panel count per dimension doubles until two
// successive levels agree within rel_tol (sup norm, relative to the result
// scale). Throws NumericalError if the cap is reached without agreement.
QuadratureResult integrate(
    int output_dim,
    const std::function<void(std::span<const double> x, std::span<double> out)>& f,
    std::span<const Interval> box, const QuadratureOptions& options = {});

// Scalar convenience wrapper.
double integrate_scalar(const std::function<double(std::span<const double>)>& f,
                        std::span<const Interval> box,
                        const QuadratureOptions& options = {});

}  // namespace rlmc::quad
