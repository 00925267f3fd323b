#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlmc/basis.hpp"
#include "rlmc/measures.hpp"

#include "json.hpp"

namespace rlmc {

struct CoefficientVector {
  Eigen::VectorXd alpha;
  int sample_count = 0;  // M used (0 for exact projections)
  int time_index = 0;    // the time these coefficients belong to
};

// Solver output: the regression coefficients for times 1..N plus the
// metadata needed to reproduce the run exactly.
struct CoefficientMatrix {
  std::vector<CoefficientVector> rows;  // rows[i] holds the time-(i+1) vector
  std::string solver_kind;
  std::uint64_t master_seed = 0;
  int sample_count = 0;  // M
  int basis_size = 0;    // K
  nlohmann::json metadata;  // fully resolved configuration (set by callers)

  int num_steps() const { return static_cast<int>(rows.size()); }

  // Coefficients used from decision epoch n-1, i.e. the time-n row, n=1..N.
  const Eigen::VectorXd& row_for_time(int n) const;
};

// Monte Carlo projection: alpha = A^{-1} (1/M) sum values_m phi(points_m).
// Points are flattened M x d.
CoefficientVector project_mc(std::span<const double> points,
                             std::span<const double> values,
                             const BasisFamily& basis, const GramMatrix& gram,
                             int time_index = 0);

// Exact projection of h onto the basis span under the measure component,
// computed by deterministic adaptive quadrature.
CoefficientVector project_exact(const std::function<double(std::span<const double>)>& h,
                                const BasisFamily& basis,
                                const MeasureComponent& component,
                                const GramMatrix& gram);
CoefficientVector project_exact(const std::function<double(std::span<const double>)>& h,
                                const BasisFamily& basis, const TrainingMeasure& measure,
                                const GramMatrix& gram);

// L2(mu) distance between h and its exact projection.
double projection_error(const std::function<double(std::span<const double>)>& h,
                        const BasisFamily& basis, const MeasureComponent& component,
                        const GramMatrix& gram);
double projection_error(const std::function<double(std::span<const double>)>& h,
                        const BasisFamily& basis, const TrainingMeasure& measure,
                        const GramMatrix& gram);

}  // namespace rlmc
