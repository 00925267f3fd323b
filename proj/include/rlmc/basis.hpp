#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "rlmc/measures.hpp"
#include "rlmc/model.hpp"

namespace rlmc {

enum class BasisKind { monomial, orthonormal_polynomial, piecewise_affine, gaussian_radial };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

struct BasisSpec {
  BasisKind kind = BasisKind::monomial;

  // monomial / orthonormal_polynomial: maximal total degree.
  int degree = 2;

  // piecewise_affine: uniform partition (cells per dimension), or explicit
  // hypercube cells. Exactly one of the two must be provided.
  std::vector<int> cells_per_dim;
  std::vector<std::vector<Interval>> cells;

  // gaussian_radial: kernel centres and per-dimension bandwidth weights.
  std::vector<std::vector<double>> centers;
  std::vector<std::vector<double>> bandwidths;
};

// A family of K linearly independent functions on the state domain.
// Immutable after construction; evaluation is pure.
class BasisFamily {
 public:
  virtual ~BasisFamily() = default;

  BasisKind kind() const { return kind_; }
  int size() const { return size_; }
  int dim() const { return domain_.dimension(); }
  const StateDomain& domain() const { return domain_; }

  // Writes (phi_1(x), ..., phi_K(x)); x must lie in the domain.
  void eval(std::span<const double> x, std::span<double> out) const;

  // Structure hooks for closed-form conditional expectations (1-d only).
  // Polynomial kinds expose each phi_k as monomial coefficients; the
  // piecewise-affine kind exposes its cells.
  virtual const std::vector<std::vector<double>>* monomial_coefficients() const {
    return nullptr;
  }
  virtual const std::vector<std::vector<Interval>>* partition_cells() const {
    return nullptr;
  }

 protected:
  BasisFamily(BasisKind kind, int size, StateDomain domain)
      : kind_(kind), size_(size), domain_(std::move(domain)) {}

  virtual void eval_impl(std::span<const double> x, std::span<double> out) const = 0;

 private:
  BasisKind kind_;
  int size_;
  StateDomain domain_;
};

std::unique_ptr<BasisFamily> make_basis(const BasisSpec& spec, StateDomain domain);

// Gram matrix A = E_mu[phi phi^T] with a stored symmetric factorization. The
// inverse is never formed explicitly; apply_inverse() solves against the
// factorization. Jitter is added at most once, only when the spectrum is
// degenerate relative to machine precision, and its magnitude is recorded.
class GramMatrix {
 public:
  GramMatrix(Eigen::MatrixXd matrix, long quadrature_nodes);

  int size() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double jitter() const { return jitter_; }
  double min_eigenvalue() const { return min_eigenvalue_; }
  double max_eigenvalue() const { return max_eigenvalue_; }
  long quadrature_nodes() const { return quadrature_nodes_; }  // 0 = closed form

  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& rhs) const;

 private:
  Eigen::MatrixXd matrix_;  // after jitter, if any
  Eigen::LDLT<Eigen::MatrixXd> factorization_;
  double jitter_ = 0.0;
  double min_eigenvalue_ = 0.0;  // pre-jitter spectrum estimate
  double max_eigenvalue_ = 0.0;
  long quadrature_nodes_ = 0;
};

// Gram matrix of the family under one measure component. Closed forms are
// used for monomial/uniform, orthonormal/uniform and piecewise-affine/uniform
// pairs on a matching box; everything else integrates by adaptive tensor
// Gauss-Legendre. Radial families additionally zero out entries below 1e-14.
GramMatrix gram_matrix(const BasisFamily& basis, const MeasureComponent& component);

// Convenience overload: the layer-n component of the training measure.
GramMatrix gram_matrix(const BasisFamily& basis, const TrainingMeasure& measure,
                       int n = 1);

}  // namespace rlmc
