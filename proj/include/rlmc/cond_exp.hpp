#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rlmc/basis.hpp"
#include "rlmc/model.hpp"

namespace rlmc {

// Evaluator of the conditional expectations E[phi_k(X_{n+1}) | X_n=x, u_n=u]
// for all k at once. Immutable and pure; repeated evaluation at the same
// arguments returns identical values for every strategy.
class CondExpEvaluator {
 public:
  virtual ~CondExpEvaluator() = default;

  int size() const { return size_; }
  const std::string& strategy() const { return strategy_; }

  virtual void eval(int n, std::span<const double> x, std::span<const double> u,
                    std::span<double> out) const = 0;

 protected:
  CondExpEvaluator(int size, std::string strategy)
      : size_(size), strategy_(std::move(strategy)) {}

 private:
  int size_;
  std::string strategy_;
};

// Convenience wrapper returning a fresh vector.
std::vector<double> cond_exp_basis(const CondExpEvaluator& evaluator, int n,
                                   std::span<const double> x,
                                   std::span<const double> u);

// Closed forms for 1-d clamped affine-Gaussian dynamics with polynomial or
// piecewise-affine bases (censored-normal moments). Throws ConfigError if the
// model/basis pair is not supported; the caller then selects a fallback.
std::unique_ptr<CondExpEvaluator> make_closed_form_evaluator(const ControlledModel& model,
                                                             const BasisFamily& basis);

// Gauss-Hermite quadrature applied to the pre-clamp Gaussian with the clamped
// integrand; works for any basis on 1-d affine-Gaussian models.
std::unique_ptr<CondExpEvaluator> make_gauss_hermite_evaluator(
    const ControlledModel& model, const BasisFamily& basis, int order = 16);

// Fixed-seed inner Monte Carlo over the model's uniform noise; the same noise
// panel is reused at every (n, x, u), so evaluation is deterministic and
// smooth in the control.
std::unique_ptr<CondExpEvaluator> make_inner_mc_evaluator(const ControlledModel& model,
                                                          const BasisFamily& basis,
                                                          int samples = 512,
                                                          std::uint64_t seed = 0x494e4d43ULL);

// closed_form when supported, then gauss_hermite, then inner Monte Carlo.
std::unique_ptr<CondExpEvaluator> make_default_evaluator(const ControlledModel& model,
                                                         const BasisFamily& basis,
                                                         std::uint64_t seed = 0x494e4d43ULL);

}  // namespace rlmc
