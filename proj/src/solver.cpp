#include "apusp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <numeric>
#include <thread>

namespace apusp {

namespace {

struct Prepared {
    std::vector<double> u;
    std::vector<double> log_w;
};

Prepared prepare(const ModelSpec& model, const Menu& menu) {
    Prepared prep;
    prep.u.reserve(menu.size());
    prep.log_w.reserve(menu.size());
    for (const auto& a : menu.allocations()) {
        prep.u.push_back(eval_selfish_utility(model.utility, a));
        prep.log_w.push_back(log_cost_weight(model, a));
    }
    return prep;
}

double prob_sum(const ModelSpec& model, const Prepared& prep, double lambda) {
    double sum = 0.0;
    for (std::size_t i = 0; i < prep.u.size(); ++i)
        sum += cost_marginal_inverse_logw(model.cost.family, prep.log_w[i], prep.u[i] + lambda);
    return sum;
}

}  // namespace

SolveResult solve_menu(const ModelSpec& model, const Menu& menu, const SolveOptions& opts) {
    const Prepared prep = prepare(model, menu);
    const std::size_t n = menu.size();

    if (n == 1) {
        SolveResult res{ChoiceDistribution(menu, {1.0}), 0.0, 0, 0.0};
        // Any lambda with the corner KKT inequality satisfied works; pick the
        // interior-marginal value so the residual is zero for entropy too.
        if (model.cost.family == CostFamily::quadratic)
            res.lambda = 2.0 * std::exp(prep.log_w[0]) - prep.u[0];
        else
            res.lambda = std::exp(prep.log_w[0]) - prep.u[0];
        res.max_foc_residual = 0.0;
        return res;
    }

    // Initial bracket around the utility scale, then geometric expansion.
    double scale = 1.0;
    for (double u : prep.u) scale = std::max(scale, std::abs(u));
    double lo = -scale, hi = scale;
    int iterations = 0;
    while (prob_sum(model, prep, lo) > 1.0) {
        lo *= 2.0;
        if (++iterations > 2000 || !std::isfinite(lo))
            throw BracketFailure("no finite lower lambda bracket for menu " + menu.id());
    }
    while (prob_sum(model, prep, hi) < 1.0) {
        hi *= 2.0;
        if (++iterations > 4000 || !std::isfinite(hi))
            throw BracketFailure("no finite upper lambda bracket for menu " + menu.id());
    }

    double lambda = 0.5 * (lo + hi);
    double sum = prob_sum(model, prep, lambda);
    int bisections = 0;
    while (std::abs(sum - 1.0) > opts.tol) {
        if (++bisections > opts.max_iterations)
            throw NonConvergence("dual bisection did not converge for menu " + menu.id());
        if (sum < 1.0)
            lo = lambda;
        else
            hi = lambda;
        double next = 0.5 * (lo + hi);
        if (next == lambda) break;  // interval exhausted at double precision
        lambda = next;
        sum = prob_sum(model, prep, lambda);
    }

    std::vector<double> probs(n);
    for (std::size_t i = 0; i < n; ++i)
        probs[i] = cost_marginal_inverse_logw(model.cost.family, prep.log_w[i], prep.u[i] + lambda);

    SolveResult res{ChoiceDistribution(menu, std::move(probs)), lambda, bisections, 0.0};
    auto residuals = foc_residuals(model, menu, res);
    res.max_foc_residual = residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
    return res;
}

double objective_value(const ModelSpec& model, const Menu& menu, const ChoiceDistribution& rho) {
    if (!(rho.menu == menu)) throw MenuMismatch("distribution menu does not match " + menu.id());
    double value = 0.0;
    for (std::size_t i = 0; i < menu.size(); ++i) {
        const auto& a = menu.allocations()[i];
        double p = rho.probs[i];
        value += eval_selfish_utility(model.utility, a) * p -
                 cost_value(model.cost.family, cost_weight(model, a), p);
    }
    return value;
}

std::vector<double> foc_residuals(const ModelSpec& model, const Menu& menu,
                                  const SolveResult& result) {
    std::vector<double> residuals;
    residuals.reserve(menu.size());
    for (std::size_t i = 0; i < menu.size(); ++i) {
        const auto& a = menu.allocations()[i];
        double u = eval_selfish_utility(model.utility, a);
        double log_w = log_cost_weight(model, a);
        double w = std::exp(log_w);
        double p = result.distribution.probs[i];
        double scale = std::max(1.0, std::isfinite(w) ? w : 1.0);
        double r;
        if (p <= 0.0) {
            // stationarity must not push probability above 0: u - c'(0+) + lambda <= 0
            double marginal_at_zero =
                model.cost.family == CostFamily::entropy ? -std::numeric_limits<double>::infinity()
                                                         : 0.0;
            r = std::max(0.0, (u - marginal_at_zero + result.lambda) / scale);
        } else if (p >= 1.0) {
            double marginal_at_one = model.cost.family == CostFamily::entropy ? w : 2.0 * w;
            r = std::max(0.0, -(u - marginal_at_one + result.lambda) / scale);
        } else {
            // Interior: recompute the marginal in the log domain so weights of
            // order 2^100 do not amplify the rounding of exp/log round trips.
            double marginal_over_w = model.cost.family == CostFamily::entropy
                                         ? std::log(p) + 1.0
                                         : 2.0 * p;
            double r_scaled = (u + result.lambda) * std::exp(-log_w) - marginal_over_w;
            r = std::abs(r_scaled) * std::min(scale, std::exp(log_w)) / scale;
        }
        residuals.push_back(r);
    }
    return residuals;
}

namespace {

// Enumerate compositions of `units` grid cells over `n` coordinates and keep
// the best objective. Box constraints restrict the search to a refinement
// neighborhood.
struct GridSearch {
    const ModelSpec& model;
    const Menu& menu;
    std::vector<double> u;
    std::vector<double> w;

    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<double> best;

    explicit GridSearch(const ModelSpec& m, const Menu& menu_) : model(m), menu(menu_) {
        for (const auto& a : menu.allocations()) {
            u.push_back(eval_selfish_utility(model.utility, a));
            w.push_back(cost_weight(model, a));
        }
    }

    double objective(const std::vector<double>& p) const {
        double v = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            v += u[i] * p[i] - cost_value(model.cost.family, w[i], p[i]);
        return v;
    }

    void search(const std::vector<double>& lo, const std::vector<double>& hi, double step) {
        std::vector<double> p(u.size(), 0.0);
        recurse(p, 0, 1.0, lo, hi, step);
    }

    void recurse(std::vector<double>& p, std::size_t i, double remaining,
                 const std::vector<double>& lo, const std::vector<double>& hi, double step) {
        if (i + 1 == p.size()) {
            if (remaining < lo[i] - 1e-12 || remaining > hi[i] + 1e-12) return;
            p[i] = remaining;
            double v = objective(p);
            if (v > best_value) {
                best_value = v;
                best = p;
            }
            return;
        }
        double start = std::ceil(lo[i] / step - 1e-9) * step;
        for (double q = start; q <= std::min(hi[i], remaining) + 1e-12; q += step) {
            p[i] = std::min(q, remaining);
            recurse(p, i + 1, remaining - p[i], lo, hi, step);
        }
    }
};

}  // namespace

ChoiceDistribution oracle_solve(const ModelSpec& model, const Menu& menu, double grid_step) {
    const std::size_t n = menu.size();
    if (n > 4) throw InvalidSpec("grid oracle supports |menu| <= 4");
    if (n == 1) return ChoiceDistribution(menu, {1.0});

    // Coarse pass over the whole simplex, sized so the cell count stays small
    // for n = 4, then two shrinking refinements around the incumbent.
    double coarse = n == 2 ? std::max(grid_step, 2e-3) : (n == 3 ? 1e-2 : 2e-2);
    GridSearch gs(model, menu);
    std::vector<double> lo(n, 0.0), hi(n, 1.0);
    gs.search(lo, hi, coarse);

    double step = coarse;
    for (int round = 0; round < 2; ++round) {
        double next = step / 10.0;
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = std::max(0.0, gs.best[i] - step);
            hi[i] = std::min(1.0, gs.best[i] + step);
        }
        gs.search(lo, hi, next);
        step = next;
    }
    return ChoiceDistribution(menu, gs.best);
}

StochasticChoiceMap solve_dataset(const ModelSpec& model, const std::vector<Menu>& menus,
                                  const SolveOptions& opts) {
    unsigned workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("APUSP_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 0) workers = v == 0 ? workers : static_cast<unsigned>(v);
    }

    std::vector<ChoiceDistribution> results;
    results.reserve(menus.size());
    auto solve_one = [&](const Menu& menu) { return solve_menu(model, menu, opts).distribution; };

    if (workers > 1 && menus.size() > 1) {
        std::vector<std::future<ChoiceDistribution>> futures;
        futures.reserve(menus.size());
        for (const auto& menu : menus)
            futures.push_back(std::async(std::launch::async, solve_one, std::cref(menu)));
        for (auto& f : futures) results.push_back(f.get());
    } else {
        for (const auto& menu : menus) results.push_back(solve_one(menu));
    }

    StochasticChoiceMap out;
    for (std::size_t i = 0; i < menus.size(); ++i)
        out.emplace(menus[i].id(), std::move(results[i]));
    return out;
}

}  // namespace apusp
