#include "apusp/model.hpp"

#include <algorithm>
#include <cmath>

namespace apusp {

UtilitySpec UtilitySpec::affine(double slope, double intercept) {
    if (!(slope > 0.0)) throw InvalidSpec("utility slope must be > 0");
    return {slope, intercept};
}

double eval_selfish_utility(const UtilitySpec& spec, const Allocation& a) {
    return spec.slope * a.x1 + spec.intercept;
}

NormSpec NormSpec::fehr_schmidt(double alpha, double beta) {
    if (!(alpha > 0.0)) throw InvalidSpec("fehr_schmidt alpha must be > 0");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidSpec("fehr_schmidt beta must be in (0,1)");
    return {FehrSchmidt{alpha, beta}};
}

NormSpec NormSpec::table(std::vector<std::pair<Allocation, double>> entries) {
    return {Table{std::move(entries)}};
}

double eval_norm(const NormSpec& spec, const UtilitySpec& util, const Allocation& a) {
    struct Visitor {
        const UtilitySpec& util;
        const Allocation& a;
        double operator()(const NormSpec::Multiplicative&) const {
            return (a.x1 + 1.0) * (a.x2 + 1.0);
        }
        double operator()(const NormSpec::FehrSchmidt& fs) const {
            return a.x1 - fs.alpha * std::max(a.x2 - a.x1, 0.0) -
                   fs.beta * std::max(a.x1 - a.x2, 0.0);
        }
        double operator()(const NormSpec::Selfish&) const {
            return eval_selfish_utility(util, a);
        }
        double operator()(const NormSpec::Table& t) const {
            for (const auto& [key, value] : t.entries)
                if (key == a) return value;
            throw MissingTableEntry("norm table has no entry for allocation " +
                                    format_payoff(a.x1) + ":" + format_payoff(a.x2));
        }
    };
    return std::visit(Visitor{util, a}, spec.kind);
}

CostFamilySpec CostFamilySpec::entropy_selfish_exponent(double eta, double gamma) {
    if (!(eta > 1.0) || !(gamma > 0.0)) throw InvalidSpec("selfish_exponent needs eta > 1, gamma > 0");
    return {CostFamily::entropy, WeightRule{WeightRule::SelfishExponent{eta, gamma}}};
}

CostFamilySpec CostFamilySpec::entropy_inverse_norm(double eta, double gamma) {
    if (!(eta > 1.0) || !(gamma > 0.0)) throw InvalidSpec("inverse_norm_exponent needs eta > 1, gamma > 0");
    return {CostFamily::entropy, WeightRule{WeightRule::InverseNormExponent{eta, gamma}}};
}

CostFamilySpec CostFamilySpec::quadratic_fs(double eta, double alpha, double beta) {
    if (!(eta > 1.0) || !(alpha > 0.0) || !(beta > 0.0))
        throw InvalidSpec("fs_exponent needs eta > 1, alpha > 0, beta > 0");
    return {CostFamily::quadratic, WeightRule{WeightRule::FsExponent{eta, alpha, beta}}};
}

CostFamilySpec CostFamilySpec::constant(CostFamily family, double a) {
    if (!(a > 0.0)) throw InvalidSpec("constant weight must be > 0");
    return {family, WeightRule{WeightRule::Constant{a}}};
}

double log_cost_weight(const ModelSpec& model, const Allocation& a) {
    struct Visitor {
        const ModelSpec& model;
        const Allocation& a;
        double operator()(const WeightRule::SelfishExponent& r) const {
            return eval_selfish_utility(model.utility, a) / r.gamma * std::log(r.eta);
        }
        double operator()(const WeightRule::InverseNormExponent& r) const {
            double phi = eval_norm(model.norm, model.utility, a);
            if (!(phi > 0.0))
                throw NonPositiveNorm("inverse_norm_exponent requires phi > 0, got phi = " +
                                      format_payoff(phi) + " at " + format_payoff(a.x1) + ":" +
                                      format_payoff(a.x2));
            return r.gamma / phi * std::log(r.eta);
        }
        double operator()(const WeightRule::FsExponent& r) const {
            double expo = r.alpha * std::max(a.x2 - a.x1, 0.0) + r.beta * std::max(a.x1 - a.x2, 0.0);
            return expo * std::log(r.eta);
        }
        double operator()(const WeightRule::Constant& r) const { return std::log(r.a); }
    };
    double lw = std::visit(Visitor{model, a}, model.cost.weight_rule.kind);
    if (!std::isfinite(lw))
        throw Overflow("cost weight is not finite at allocation " + format_payoff(a.x1) + ":" +
                       format_payoff(a.x2));
    return lw;
}

double cost_weight(const ModelSpec& model, const Allocation& a) {
    double w = std::exp(log_cost_weight(model, a));
    if (!std::isfinite(w) || !(w > 0.0))
        throw Overflow("cost weight overflows double at allocation " + format_payoff(a.x1) + ":" +
                       format_payoff(a.x2));
    return w;
}

double cost_value(CostFamily family, double a, double p) {
    if (!(a > 0.0)) throw NonPositiveWeight("cost weight must be > 0");
    if (family == CostFamily::entropy) {
        if (p <= 0.0 || p >= 1.0) return 0.0;  // limit convention at 0, ln 1 = 0 at 1
        return a * p * std::log(p);
    }
    return a * p * p;
}

double cost_marginal(CostFamily family, double a, double p) {
    if (!(a > 0.0)) throw NonPositiveWeight("cost weight must be > 0");
    if (family == CostFamily::entropy) {
        if (!(p > 0.0 && p < 1.0))
            throw DomainError("entropy marginal cost is undefined at p = " + format_payoff(p));
        return a * (std::log(p) + 1.0);
    }
    return 2.0 * a * p;
}

double cost_marginal_inverse(CostFamily family, double a, double m) {
    if (!(a > 0.0)) throw NonPositiveWeight("cost weight must be > 0");
    return cost_marginal_inverse_logw(family, std::log(a), m);
}

double cost_marginal_inverse_logw(CostFamily family, double log_a, double m) {
    if (family == CostFamily::entropy) {
        // p = exp(m/a - 1), a = e^log_a; clamp the exponent at 0 so p <= 1.
        double t = m * std::exp(-log_a) - 1.0;
        return std::exp(std::min(t, 0.0));
    }
    double p = 0.5 * m * std::exp(-log_a);
    return std::clamp(p, 0.0, 1.0);
}

MarginalOrderingReport check_marginal_ordering(const ModelSpec& model,
                                               const std::vector<Allocation>& allocs,
                                               const std::vector<double>& p_grid) {
    for (std::size_t i = 0; i < allocs.size(); ++i)
        for (std::size_t j = i + 1; j < allocs.size(); ++j)
            if (allocs[i] == allocs[j]) throw InvalidSpec("allocations must be pairwise distinct");
    for (double p : p_grid)
        if (!(p > 0.0 && p < 1.0)) throw InvalidSpec("p_grid must lie in (0,1)");

    MarginalOrderingReport report;
    for (std::size_t i = 0; i < allocs.size(); ++i) {
        for (std::size_t j = 0; j < allocs.size(); ++j) {
            if (i == j) continue;
            double phi_i = eval_norm(model.norm, model.utility, allocs[i]);
            double phi_j = eval_norm(model.norm, model.utility, allocs[j]);
            if (!(phi_i < phi_j)) continue;
            double a_i = cost_weight(model, allocs[i]);
            double a_j = cost_weight(model, allocs[j]);
            for (double p : p_grid) {
                MarginalOrderingEntry e;
                e.lower_norm = allocs[i];
                e.higher_norm = allocs[j];
                e.p = p;
                e.marginal_lower = cost_marginal(model.cost.family, a_i, p);
                e.marginal_higher = cost_marginal(model.cost.family, a_j, p);
                e.pass = e.marginal_lower > e.marginal_higher;
                report.all_pass = report.all_pass && e.pass;
                report.entries.push_back(e);
            }
        }
    }
    return report;
}

}  // namespace apusp
