#pragma once

#include <map>

#include "apusp/model.hpp"

namespace apusp {

struct SolveResult {
    ChoiceDistribution distribution;
    double lambda = 0.0;  // dual multiplier at the optimum, FOC convention c' = u + lambda
    int iterations = 0;
    double max_foc_residual = 0.0;
};

struct SolveOptions {
    double tol = 1e-12;  // |sum p - 1| termination
    int max_iterations = 200;
};

// Maximizes sum_x [u(x1) rho(x) - c_{a(x)}(rho(x))] over the simplex by
// bisecting the dual multiplier: each p(x; lambda) is the marginal-cost
// inverse of u(x1)+lambda, a nondecreasing function of lambda, so the sum
// crosses 1 exactly once. Corners of the quadratic family come out of the
// clamp; entropy solutions are strictly interior.
SolveResult solve_menu(const ModelSpec& model, const Menu& menu, const SolveOptions& opts = {});

double objective_value(const ModelSpec& model, const Menu& menu, const ChoiceDistribution& rho);

// KKT residuals per allocation, scaled by max(1, a(x)) so astronomically
// large weights do not report pure floating-point noise as violation.
std::vector<double> foc_residuals(const ModelSpec& model, const Menu& menu,
                                  const SolveResult& result);

// Independent verification path: exhaustive simplex-grid search with two
// local refinements around the incumbent. |menu| <= 4.
ChoiceDistribution oracle_solve(const ModelSpec& model, const Menu& menu, double grid_step = 1e-3);

using StochasticChoiceMap = std::map<std::string, ChoiceDistribution>;

// Batch driver. Menus may be solved in parallel (APUSP_THREADS caps the
// worker count, 0 = auto); assembly order is fixed so output is
// bit-identical to sequential execution.
StochasticChoiceMap solve_dataset(const ModelSpec& model, const std::vector<Menu>& menus,
                                  const SolveOptions& opts = {});

}  // namespace apusp
