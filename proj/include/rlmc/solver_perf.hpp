#pragma once

#include "rlmc/solver_value.hpp"

namespace rlmc {

using PerfSolveConfig = ValueSolveConfig;  // same knobs; truncation is unused

// Regress-later performance iteration: each backward step regresses pathwise
// performances of trajectories resimulated under the already-estimated
// control maps, with fresh noise per (layer, point, step). No truncation is
// applied: targets are genuine pathwise sums of bounded rewards.
SolveResult solve_perf(const ControlledModel& model, const BasisFamily& basis,
                       const CondExpEvaluator& evaluator, const TrainingMeasure& measure,
                       const PerfSolveConfig& config);

// Control map induced by a coefficient matrix at time s (uses the time-(s+1)
// row): the argmax of f(s, x, u) + sum_k alpha_k phihat_k(s, x, u). Shared by
// the resimulation pass and the forward policy evaluator.
ControlOptimum control_map_from(const CoefficientMatrix& coefficients,
                                const CondExpEvaluator& evaluator,
                                const ControlledModel& model, int s,
                                std::span<const double> x,
                                const OptimizerConfig& optimizer);

}  // namespace rlmc
