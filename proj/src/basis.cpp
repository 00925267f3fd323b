#include "rlmc/basis.hpp"

#include <algorithm>
#include <cmath>

#include "rlmc/quadrature.hpp"

namespace rlmc {

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::monomial: return "monomial";
    case BasisKind::orthonormal_polynomial: return "orthonormal_polynomial";
    case BasisKind::piecewise_affine: return "piecewise_affine";
    case BasisKind::gaussian_radial: return "gaussian_radial";
  }
  return "unknown";
}

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "monomial") return BasisKind::monomial;
  if (name == "orthonormal_polynomial") return BasisKind::orthonormal_polynomial;
  if (name == "piecewise_affine") return BasisKind::piecewise_affine;
  if (name == "gaussian_radial") return BasisKind::gaussian_radial;
  throw ConfigError("unknown basis kind: " + name);
}

void BasisFamily::eval(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != dim()) {
    throw ArgumentError("BasisFamily::eval: state dimension mismatch");
  }
  if (!domain_.contains(x, 1e-9)) {
    throw ArgumentError("BasisFamily::eval: state outside the basis domain");
  }
  if (static_cast<int>(out.size()) != size_) {
    throw ArgumentError("BasisFamily::eval: output span must have length K");
  }
  eval_impl(x, out);
}

namespace {

// Multi-indices with total degree <= degree, ordered by (degree, lexicographic).
std::vector<std::vector<int>> total_degree_indices(int dim, int degree) {
  std::vector<std::vector<int>> result;
  for (int total = 0; total <= degree; ++total) {
    std::vector<std::vector<int>> level;
    std::vector<int> idx(dim, 0);
    auto gen = [&](auto&& self, int pos, int remaining) -> void {
      if (pos == dim - 1) {
        idx[pos] = remaining;
        level.push_back(idx);
        return;
      }
      for (int j = remaining; j >= 0; --j) {
        idx[pos] = j;
        self(self, pos + 1, remaining - j);
      }
    };
    gen(gen, 0, total);
    for (auto& v : level) result.push_back(std::move(v));
  }
  return result;
}

class MonomialBasis final : public BasisFamily {
 public:
  MonomialBasis(int degree, StateDomain domain)
      : BasisFamily(BasisKind::monomial,
                    static_cast<int>(total_degree_indices(domain.dimension(), degree).size()),
                    domain),
        exponents_(total_degree_indices(domain.dimension(), degree)) {
    if (dim() == 1) {
      coefficients_.resize(exponents_.size());
      for (std::size_t k = 0; k < exponents_.size(); ++k) {
        coefficients_[k].assign(exponents_[k][0] + 1, 0.0);
        coefficients_[k][exponents_[k][0]] = 1.0;
      }
    }
  }

  const std::vector<std::vector<int>>& exponents() const { return exponents_; }

  const std::vector<std::vector<double>>* monomial_coefficients() const override {
    return dim() == 1 ? &coefficients_ : nullptr;
  }

 protected:
  void eval_impl(std::span<const double> x, std::span<double> out) const override {
    for (std::size_t k = 0; k < exponents_.size(); ++k) {
      double v = 1.0;
      for (int d = 0; d < dim(); ++d) {
        for (int j = 0; j < exponents_[k][d]; ++j) v *= x[d];
      }
      out[k] = v;
    }
  }

 private:
  std::vector<std::vector<int>> exponents_;
  std::vector<std::vector<double>> coefficients_;
};

// Legendre polynomial coefficients in the monomial basis on [-1, 1].
std::vector<std::vector<double>> legendre_coefficients(int max_degree) {
  std::vector<std::vector<double>> p(max_degree + 1);
  p[0] = {1.0};
  if (max_degree >= 1) p[1] = {0.0, 1.0};
  for (int k = 2; k <= max_degree; ++k) {
    // k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}
    p[k].assign(k + 1, 0.0);
    for (int j = 0; j < k; ++j) p[k][j + 1] += (2.0 * k - 1.0) / k * p[k - 1][j];
    for (std::size_t j = 0; j < p[k - 2].size(); ++j) {
      p[k][j] -= (k - 1.0) / k * p[k - 2][j];
    }
  }
  return p;
}

// Substitutes t = scale * x + shift into a polynomial in t.
std::vector<double> substitute_affine(const std::vector<double>& poly, double scale,
                                      double shift) {
  std::vector<double> result{0.0};
  // Horner in t: result = poly[n] then result = result*(scale x + shift) + poly[k]
  for (int k = static_cast<int>(poly.size()) - 1; k >= 0; --k) {
    std::vector<double> next(result.size() + 1, 0.0);
    for (std::size_t j = 0; j < result.size(); ++j) {
      next[j + 1] += result[j] * scale;
      next[j] += result[j] * shift;
    }
    if (next.size() > 1 && next.back() == 0.0) next.pop_back();
    next[0] += poly[k];
    result = std::move(next);
  }
  return result;
}

// Tensor products of normalized shifted Legendre polynomials with total
// degree <= degree: orthonormal in L2 of the uniform distribution on the box.
class OrthonormalPolynomialBasis final : public BasisFamily {
 public:
  OrthonormalPolynomialBasis(int degree, StateDomain domain)
      : BasisFamily(BasisKind::orthonormal_polynomial,
                    static_cast<int>(total_degree_indices(domain.dimension(), degree).size()),
                    domain),
        exponents_(total_degree_indices(domain.dimension(), degree)),
        legendre_(legendre_coefficients(degree)) {
    if (dim() == 1) {
      const auto& iv = this->domain().bounds[0];
      const double scale = 2.0 / iv.width();
      const double shift = -(iv.lo + iv.hi) / iv.width();
      coefficients_.resize(exponents_.size());
      for (std::size_t k = 0; k < exponents_.size(); ++k) {
        const int deg = exponents_[k][0];
        auto c = substitute_affine(legendre_[deg], scale, shift);
        const double norm = std::sqrt(2.0 * deg + 1.0);
        for (double& v : c) v *= norm;
        coefficients_[k] = std::move(c);
      }
    }
  }

  const std::vector<std::vector<double>>* monomial_coefficients() const override {
    return dim() == 1 ? &coefficients_ : nullptr;
  }

 protected:
  void eval_impl(std::span<const double> x, std::span<double> out) const override {
    for (std::size_t k = 0; k < exponents_.size(); ++k) {
      double v = 1.0;
      for (int d = 0; d < dim(); ++d) {
        const auto& iv = domain().bounds[d];
        const double t = 2.0 * (x[d] - iv.lo) / iv.width() - 1.0;
        const int deg = exponents_[k][d];
        double p0 = 1.0, p1 = t;
        double p = (deg == 0) ? 1.0 : t;
        for (int j = 2; j <= deg; ++j) {
          p = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p;
        }
        v *= std::sqrt(2.0 * deg + 1.0) * p;
      }
      out[k] = v;
    }
  }

 private:
  std::vector<std::vector<int>> exponents_;
  std::vector<std::vector<double>> legendre_;
  std::vector<std::vector<double>> coefficients_;
};

class PiecewiseAffineBasis final : public BasisFamily {
 public:
  PiecewiseAffineBasis(std::vector<std::vector<Interval>> cells, StateDomain domain)
      : BasisFamily(BasisKind::piecewise_affine,
                    static_cast<int>(cells.size()) * (domain.dimension() + 1), domain),
        cells_(std::move(cells)) {}

  const std::vector<std::vector<Interval>>* partition_cells() const override {
    return &cells_;
  }

  // Cell membership: half-open on the right except at the domain boundary.
  int locate(std::span<const double> x) const {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      bool inside = true;
      for (int d = 0; d < dim(); ++d) {
        const auto& c = cells_[i][d];
        const bool closed_hi = c.hi >= domain().bounds[d].hi - 1e-12;
        if (x[d] < c.lo || (closed_hi ? x[d] > c.hi : x[d] >= c.hi)) {
          inside = false;
          break;
        }
      }
      if (inside) return static_cast<int>(i);
    }
    return -1;
  }

 protected:
  void eval_impl(std::span<const double> x, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    const int cell = locate(x);
    if (cell < 0) return;  // clamp tolerance edge: treat as no support
    const int base = cell * (dim() + 1);
    out[base] = 1.0;
    for (int d = 0; d < dim(); ++d) out[base + 1 + d] = x[d];
  }

 private:
  std::vector<std::vector<Interval>> cells_;
};

class GaussianRadialBasis final : public BasisFamily {
 public:
  GaussianRadialBasis(std::vector<std::vector<double>> centers,
                      std::vector<std::vector<double>> bandwidths, StateDomain domain)
      : BasisFamily(BasisKind::gaussian_radial, static_cast<int>(centers.size()), domain),
        centers_(std::move(centers)),
        bandwidths_(std::move(bandwidths)) {
    norms_.resize(centers_.size());
    const double two_pi_pow = std::pow(2.0 * M_PI, 0.5 * dim());
    for (std::size_t k = 0; k < centers_.size(); ++k) {
      double prod = 1.0;
      for (double w : bandwidths_[k]) prod *= w;
      norms_[k] = std::sqrt(prod) / two_pi_pow;
    }
  }

 protected:
  void eval_impl(std::span<const double> x, std::span<double> out) const override {
    for (std::size_t k = 0; k < centers_.size(); ++k) {
      double q = 0.0;
      for (int d = 0; d < dim(); ++d) {
        const double dx = x[d] - centers_[k][d];
        q += bandwidths_[k][d] * dx * dx;
      }
      out[k] = norms_[k] * std::exp(-0.5 * q);
    }
  }

 private:
  std::vector<std::vector<double>> centers_;
  std::vector<std::vector<double>> bandwidths_;
  std::vector<double> norms_;
};

std::vector<std::vector<Interval>> uniform_cells(const std::vector<int>& counts,
                                                 const StateDomain& domain) {
  const int dim = domain.dimension();
  if (static_cast<int>(counts.size()) != dim) {
    throw ConfigError("piecewise_affine: cells_per_dim size must match dimension");
  }
  long total = 1;
  for (int c : counts) {
    if (c < 1) throw ConfigError("piecewise_affine: cell counts must be >= 1");
    total *= c;
  }
  std::vector<std::vector<Interval>> cells;
  cells.reserve(total);
  std::vector<int> idx(dim, 0);
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    std::vector<Interval> cell(dim);
    for (int d = 0; d < dim; ++d) {
      const int i = static_cast<int>(rem % counts[d]);
      rem /= counts[d];
      const double w = domain.bounds[d].width() / counts[d];
      cell[d] = Interval{domain.bounds[d].lo + i * w, domain.bounds[d].lo + (i + 1) * w};
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

void validate_cells(const std::vector<std::vector<Interval>>& cells,
                    const StateDomain& domain) {
  if (cells.empty()) throw ConfigError("piecewise_affine: empty partition");
  const int dim = domain.dimension();
  double covered = 0.0;
  for (const auto& cell : cells) {
    if (static_cast<int>(cell.size()) != dim) {
      throw ConfigError("piecewise_affine: cell dimension mismatch");
    }
    double vol = 1.0;
    for (int d = 0; d < dim; ++d) {
      if (!(cell[d].lo < cell[d].hi)) {
        throw ConfigError("piecewise_affine: degenerate cell");
      }
      if (cell[d].lo < domain.bounds[d].lo - 1e-12 ||
          cell[d].hi > domain.bounds[d].hi + 1e-12) {
        throw ConfigError("piecewise_affine: cell leaves the domain");
      }
      vol *= cell[d].width();
    }
    covered += vol;
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      bool overlap = true;
      for (int d = 0; d < dim; ++d) {
        if (cells[i][d].hi <= cells[j][d].lo + 1e-12 ||
            cells[j][d].hi <= cells[i][d].lo + 1e-12) {
          overlap = false;
          break;
        }
      }
      if (overlap) throw ConfigError("piecewise_affine: overlapping partition cells");
    }
  }
  if (std::abs(covered - domain.volume()) > 1e-9 * domain.volume()) {
    throw ConfigError("piecewise_affine: partition does not cover the domain");
  }
}

}  // namespace

std::unique_ptr<BasisFamily> make_basis(const BasisSpec& spec, StateDomain domain) {
  domain.validate();
  switch (spec.kind) {
    case BasisKind::monomial:
      if (spec.degree < 0) throw ConfigError("monomial: degree must be >= 0");
      return std::make_unique<MonomialBasis>(spec.degree, std::move(domain));
    case BasisKind::orthonormal_polynomial:
      if (spec.degree < 0) throw ConfigError("orthonormal_polynomial: degree must be >= 0");
      return std::make_unique<OrthonormalPolynomialBasis>(spec.degree, std::move(domain));
    case BasisKind::piecewise_affine: {
      std::vector<std::vector<Interval>> cells;
      if (!spec.cells.empty()) {
        if (!spec.cells_per_dim.empty()) {
          throw ConfigError("piecewise_affine: give cells or cells_per_dim, not both");
        }
        cells = spec.cells;
      } else {
        cells = uniform_cells(spec.cells_per_dim, domain);
      }
      validate_cells(cells, domain);
      return std::make_unique<PiecewiseAffineBasis>(std::move(cells), std::move(domain));
    }
    case BasisKind::gaussian_radial: {
      if (spec.centers.empty()) throw ConfigError("gaussian_radial: no centers");
      if (spec.centers.size() != spec.bandwidths.size()) {
        throw ConfigError("gaussian_radial: centers/bandwidths count mismatch");
      }
      for (const auto& c : spec.centers) {
        if (static_cast<int>(c.size()) != domain.dimension()) {
          throw ConfigError("gaussian_radial: center dimension mismatch");
        }
        if (!domain.contains(c)) {
          throw ConfigError("gaussian_radial: center outside the domain");
        }
      }
      for (const auto& w : spec.bandwidths) {
        if (static_cast<int>(w.size()) != domain.dimension()) {
          throw ConfigError("gaussian_radial: bandwidth dimension mismatch");
        }
        for (double v : w) {
          if (!(v > 0.0)) throw ConfigError("gaussian_radial: bandwidths must be > 0");
        }
      }
      return std::make_unique<GaussianRadialBasis>(spec.centers, spec.bandwidths,
                                                   std::move(domain));
    }
  }
  throw ConfigError("make_basis: unknown kind");
}

GramMatrix::GramMatrix(Eigen::MatrixXd matrix, long quadrature_nodes)
    : matrix_(std::move(matrix)), quadrature_nodes_(quadrature_nodes) {
  if (matrix_.rows() != matrix_.cols()) {
    throw ArgumentError("GramMatrix: matrix must be square");
  }
  matrix_ = 0.5 * (matrix_ + matrix_.transpose().eval());  // enforce symmetry
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_);
  if (es.info() != Eigen::Success) throw NumericalError("GramMatrix: eigensolver failed");
  min_eigenvalue_ = es.eigenvalues().minCoeff();
  max_eigenvalue_ = es.eigenvalues().maxCoeff();
  if (min_eigenvalue_ < 1e-12 * max_eigenvalue_) {
    jitter_ = 1e-12 * matrix_.trace() / matrix_.rows();
    matrix_ += jitter_ * Eigen::MatrixXd::Identity(matrix_.rows(), matrix_.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(matrix_);
    if (es2.info() != Eigen::Success || es2.eigenvalues().minCoeff() <= 0.0) {
      throw ConditioningError(
          "GramMatrix: numerically singular beyond jitter recovery (min eigenvalue " +
              std::to_string(min_eigenvalue_) + ")",
          min_eigenvalue_);
    }
  }
  factorization_.compute(matrix_);
  if (factorization_.info() != Eigen::Success) {
    throw ConditioningError("GramMatrix: factorization failed (min eigenvalue " +
                                std::to_string(min_eigenvalue_) + ")",
                            min_eigenvalue_);
  }
}

Eigen::VectorXd GramMatrix::apply_inverse(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != matrix_.rows()) {
    throw ArgumentError("GramMatrix::apply_inverse: size mismatch");
  }
  return factorization_.solve(rhs);
}

namespace {

bool boxes_match(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].lo - b[i].lo) > 1e-12 || std::abs(a[i].hi - b[i].hi) > 1e-12) {
      return false;
    }
  }
  return true;
}

// Uniform-measure moment of a monomial over the box: E[prod x_d^{e_d}].
double uniform_monomial_moment(const std::vector<Interval>& box,
                               const std::vector<int>& exponents) {
  double value = 1.0;
  for (std::size_t d = 0; d < box.size(); ++d) {
    const int p = exponents[d];
    const double hi = std::pow(box[d].hi, p + 1);
    const double lo = std::pow(box[d].lo, p + 1);
    value *= (hi - lo) / ((p + 1) * box[d].width());
  }
  return value;
}

Eigen::MatrixXd quadrature_gram(const BasisFamily& basis, const MeasureComponent& comp,
                                long& nodes_out) {
  const int K = basis.size();
  const int pairs = K * (K + 1) / 2;
  std::vector<double> phi(K);
  auto integrand = [&](std::span<const double> x, std::span<double> out) {
    basis.eval(x, phi);
    const double w = comp.density(x);
    int idx = 0;
    for (int i = 0; i < K; ++i) {
      for (int j = i; j < K; ++j) out[idx++] = phi[i] * phi[j] * w;
    }
  };
  quad::QuadratureOptions options;
  options.rel_tol = 1e-11;
  options.order = 24;
  options.max_panels = basis.dim() == 1 ? 1024 : 64;
  const auto result =
      quad::integrate(pairs, integrand, std::span<const Interval>(comp.box), options);
  nodes_out = result.nodes;
  Eigen::MatrixXd a(K, K);
  int idx = 0;
  for (int i = 0; i < K; ++i) {
    for (int j = i; j < K; ++j) {
      a(i, j) = result.value(idx);
      a(j, i) = result.value(idx);
      ++idx;
    }
  }
  return a;
}

}  // namespace

GramMatrix gram_matrix(const BasisFamily& basis, const MeasureComponent& component) {
  // The measure must live inside the basis domain (basis evaluation is only
  // defined there).
  for (int d = 0; d < basis.dim(); ++d) {
    if (component.box[d].lo < basis.domain().bounds[d].lo - 1e-9 ||
        component.box[d].hi > basis.domain().bounds[d].hi + 1e-9) {
      throw ConfigError("gram_matrix: measure support outside the basis domain");
    }
  }

  const bool uniform_match = component.kind == MeasureComponent::Kind::uniform_box &&
                             boxes_match(component.box, [&] {
                               std::vector<Interval> b;
                               for (const auto& iv : basis.domain().bounds) b.push_back(iv);
                               return b;
                             }());

  if (uniform_match && basis.kind() == BasisKind::orthonormal_polynomial) {
    return GramMatrix(Eigen::MatrixXd::Identity(basis.size(), basis.size()), 0);
  }
  if (uniform_match && basis.kind() == BasisKind::monomial) {
    // E[x^a x^b] per pair of exponent multi-indices.
    const auto* mono = dynamic_cast<const MonomialBasis*>(&basis);
    const auto& exps = mono->exponents();
    const int K = basis.size();
    Eigen::MatrixXd a(K, K);
    std::vector<int> sum(basis.dim());
    for (int i = 0; i < K; ++i) {
      for (int j = i; j < K; ++j) {
        for (int d = 0; d < basis.dim(); ++d) sum[d] = exps[i][d] + exps[j][d];
        a(i, j) = a(j, i) = uniform_monomial_moment(component.box, sum);
      }
    }
    return GramMatrix(std::move(a), 0);
  }
  if (uniform_match && basis.kind() == BasisKind::piecewise_affine) {
    // Block diagonal by cell: cross-cell products vanish on disjoint supports.
    const auto& cells = *basis.partition_cells();
    const int d = basis.dim();
    const int K = basis.size();
    const double volume = basis.domain().volume();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(K, K);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const int base = static_cast<int>(c) * (d + 1);
      double cell_vol = 1.0;
      for (const auto& iv : cells[c]) cell_vol *= iv.width();
      const double mass = cell_vol / volume;
      std::vector<double> m1(d), m2(d);
      for (int i = 0; i < d; ++i) {
        const auto& iv = cells[c][i];
        m1[i] = iv.mid();
        m2[i] = (std::pow(iv.hi, 3) - std::pow(iv.lo, 3)) / (3.0 * iv.width());
      }
      a(base, base) = mass;
      for (int i = 0; i < d; ++i) {
        a(base, base + 1 + i) = a(base + 1 + i, base) = mass * m1[i];
        for (int j = i; j < d; ++j) {
          const double v = (i == j) ? m2[i] : m1[i] * m1[j];
          a(base + 1 + i, base + 1 + j) = a(base + 1 + j, base + 1 + i) = mass * v;
        }
      }
    }
    return GramMatrix(std::move(a), 0);
  }

  long nodes = 0;
  Eigen::MatrixXd a = quadrature_gram(basis, component, nodes);
  if (basis.kind() == BasisKind::gaussian_radial) {
    for (int i = 0; i < a.rows(); ++i) {
      for (int j = 0; j < a.cols(); ++j) {
        if (std::abs(a(i, j)) < 1e-14) a(i, j) = 0.0;
      }
    }
  }
  return GramMatrix(std::move(a), nodes);
}

GramMatrix gram_matrix(const BasisFamily& basis, const TrainingMeasure& measure, int n) {
  return gram_matrix(basis, measure.component(n));
}

}  // namespace rlmc
