#pragma once

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "apusp/allocation.hpp"

namespace apusp {

// Selfish utility u, applied to x1 only. Strictly increasing.
struct UtilitySpec {
    // linear: u(x1) = x1; affine: u(x1) = slope*x1 + intercept, slope > 0.
    double slope = 1.0;
    double intercept = 0.0;

    static UtilitySpec linear() { return {}; }
    static UtilitySpec affine(double slope, double intercept);

    bool is_linear() const { return slope == 1.0 && intercept == 0.0; }
};

double eval_selfish_utility(const UtilitySpec& spec, const Allocation& a);

// Personal-norm utility phi.
struct NormSpec {
    struct Multiplicative {};                       // phi = (x1+1)(x2+1)
    struct FehrSchmidt {                            // phi = x1 - a*envy - b*guilt
        double alpha;
        double beta;
    };
    struct Selfish {};                              // phi = u(x1), delegated to the model's utility
    struct Table {                                  // explicit finite map
        std::vector<std::pair<Allocation, double>> entries;
    };
    std::variant<Multiplicative, FehrSchmidt, Selfish, Table> kind;

    static NormSpec multiplicative() { return {Multiplicative{}}; }
    static NormSpec fehr_schmidt(double alpha, double beta);
    static NormSpec selfish() { return {Selfish{}}; }
    static NormSpec table(std::vector<std::pair<Allocation, double>> entries);
};

// Selfish kind needs the utility spec; the two-argument overload supplies it.
double eval_norm(const NormSpec& spec, const UtilitySpec& util, const Allocation& a);

enum class CostFamily { entropy, quadratic };

// Multiplicative weight a(x) in front of the perturbation term.
struct WeightRule {
    struct SelfishExponent {  // eta^(u(x1)/gamma)
        double eta;
        double gamma;
    };
    struct InverseNormExponent {  // eta^(gamma/phi(x)), requires phi > 0
        double eta;
        double gamma;
    };
    struct FsExponent {  // eta^(alpha*envy + beta*guilt)
        double eta;
        double alpha;
        double beta;
    };
    struct Constant {  // fixed a > 0 (plain APU)
        double a;
    };
    std::variant<SelfishExponent, InverseNormExponent, FsExponent, Constant> kind;
};

struct CostFamilySpec {
    CostFamily family = CostFamily::entropy;
    WeightRule weight_rule{WeightRule::Constant{1.0}};

    static CostFamilySpec entropy_selfish_exponent(double eta, double gamma);
    static CostFamilySpec entropy_inverse_norm(double eta, double gamma);
    static CostFamilySpec quadratic_fs(double eta, double alpha, double beta);
    static CostFamilySpec constant(CostFamily family, double a);
};

struct ModelSpec {
    UtilitySpec utility;
    NormSpec norm = NormSpec::selfish();
    CostFamilySpec cost;
};

// Weight a(x). Positive and finite, or throws (NonPositiveNorm / Overflow).
double cost_weight(const ModelSpec& model, const Allocation& a);

// ln a(x). The solver works in the log domain so that exponents like 2^100
// (Table rows containing (0,0)) do not overflow.
double log_cost_weight(const ModelSpec& model, const Allocation& a);

// entropy: a*p*ln p (0 at p in {0,1} by the limit convention); quadratic: a*p^2.
double cost_value(CostFamily family, double a, double p);

// entropy: a*(ln p + 1), undefined at the endpoints; quadratic: 2*a*p.
double cost_marginal(CostFamily family, double a, double p);

// Inverse of cost_marginal, clamped to [0,1]. Monotone nondecreasing in m.
double cost_marginal_inverse(CostFamily family, double a, double m);
// Same, with the weight given as ln a. Robust to astronomically large weights.
double cost_marginal_inverse_logw(CostFamily family, double log_a, double m);

// Pointwise check of the marginal-cost ordering: phi(x) < phi(y) should give
// c'_{a(x)}(p) > c'_{a(y)}(p). The entropy families break this for p < 1/e,
// which is why the result is a report rather than an assertion.
struct MarginalOrderingEntry {
    Allocation lower_norm;  // phi(lower_norm) < phi(higher_norm)
    Allocation higher_norm;
    double p;
    double marginal_lower;
    double marginal_higher;
    bool pass;  // marginal_lower > marginal_higher
};

struct MarginalOrderingReport {
    std::vector<MarginalOrderingEntry> entries;
    bool all_pass = true;
};

MarginalOrderingReport check_marginal_ordering(const ModelSpec& model,
                                               const std::vector<Allocation>& allocs,
                                               const std::vector<double>& p_grid);

}  // namespace apusp
