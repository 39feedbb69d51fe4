#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "apusp/model.hpp"

using namespace apusp;

namespace {

const Allocation kFair{4, 4};
const Allocation kSelfish{5, 2};

ModelSpec shame_model() {
    return {UtilitySpec::linear(), NormSpec::multiplicative(),
            CostFamilySpec::entropy_inverse_norm(2.0, 100.0)};
}

ModelSpec ia_model() {
    return {UtilitySpec::linear(), NormSpec::fehr_schmidt(1.0, 0.5),
            CostFamilySpec::quadratic_fs(2.0, 1.0, 1.0)};
}

}  // namespace

TEST_CASE("menus canonicalize and reject duplicates") {
    Menu m({{4, 4}, {6, 1}, {5, 2}});
    CHECK(m.id() == "6:1,5:2,4:4");
    CHECK(m.allocations()[0] == Allocation{6, 1});
    CHECK(m.index_of({4, 4}) == 2);
    CHECK(m.contains({5, 2}));
    CHECK_FALSE(m.contains({5, 3}));
    CHECK_THROWS_AS(Menu({{1, 1}, {1, 1}}), InvalidSpec);
    CHECK_THROWS_AS(Menu({}), InvalidSpec);

    Menu sub({{5, 2}, {4, 4}});
    CHECK(sub.subset_of(m));
    CHECK_FALSE(m.subset_of(sub));
}

TEST_CASE("menu literals parse and re-canonicalize") {
    CHECK(parse_menu_literal("4:4,5:2").id() == "5:2,4:4");
    CHECK(parse_menu_literal("2.5:0.5").allocations()[0] == Allocation{2.5, 0.5});
    CHECK_THROWS_WITH_AS(parse_menu_literal("4:4,five:2"),
                         "menu token 2: 'five' is not a decimal payoff", ParseError);
    CHECK_THROWS_AS(parse_menu_literal("4:4,52"), ParseError);
}

TEST_CASE("choice distributions validate shape and mass") {
    Menu m({{4, 4}, {5, 2}});
    ChoiceDistribution d(m, {0.3, 0.7});
    CHECK(d.prob_of({4, 4}) == doctest::Approx(0.3));
    CHECK_THROWS_AS(ChoiceDistribution(m, {0.3}), MenuMismatch);
    CHECK_THROWS_AS(ChoiceDistribution(m, {0.3, 0.6}), InvalidSpec);
    CHECK_THROWS_AS(ChoiceDistribution(m, {-0.1, 1.1}), InvalidSpec);
}

TEST_CASE("utility kinds") {
    CHECK(eval_selfish_utility(UtilitySpec::linear(), kSelfish) == 5.0);
    CHECK(eval_selfish_utility(UtilitySpec::affine(2.0, 1.0), kSelfish) == 11.0);
    CHECK_THROWS_AS(UtilitySpec::affine(0.0, 1.0), InvalidSpec);
    CHECK_THROWS_AS(UtilitySpec::affine(-1.0, 0.0), InvalidSpec);
}

TEST_CASE("norm kinds") {
    UtilitySpec u = UtilitySpec::linear();
    CHECK(eval_norm(NormSpec::multiplicative(), u, kFair) == 25.0);
    CHECK(eval_norm(NormSpec::multiplicative(), u, kSelfish) == 18.0);
    CHECK(eval_norm(NormSpec::fehr_schmidt(1.0, 0.5), u, kSelfish) == doctest::Approx(3.5));
    CHECK(eval_norm(NormSpec::fehr_schmidt(1.0, 0.5), u, {2, 8}) == doctest::Approx(-4.0));
    CHECK(eval_norm(NormSpec::selfish(), u, kSelfish) == 5.0);
    CHECK(eval_norm(NormSpec::selfish(), UtilitySpec::affine(2.0, 0.0), kSelfish) == 10.0);
    CHECK_THROWS_AS(NormSpec::fehr_schmidt(0.0, 0.5), InvalidSpec);
    CHECK_THROWS_AS(NormSpec::fehr_schmidt(1.0, 1.0), InvalidSpec);

    NormSpec t = NormSpec::table({{kFair, 3.0}, {kSelfish, 1.0}});
    CHECK(eval_norm(t, u, kFair) == 3.0);
    CHECK_THROWS_AS(eval_norm(t, u, {6, 1}), MissingTableEntry);
}

TEST_CASE("weight rules evaluate in the log domain") {
    // eta^(gamma/phi): phi(4,4) = 25 -> 2^4 = 16; phi(5,2) = 18 -> 2^(50/9)
    ModelSpec shame = shame_model();
    CHECK(cost_weight(shame, kFair) == doctest::Approx(16.0));
    CHECK(cost_weight(shame, kSelfish) == doctest::Approx(std::pow(2.0, 100.0 / 18.0)));

    // phi(0,0) = 1 -> weight 2^100: representable in log form, finite as double
    CHECK(log_cost_weight(shame, {0, 0}) == doctest::Approx(100.0 * std::log(2.0)));
    CHECK(cost_weight(shame, {0, 0}) == doctest::Approx(std::pow(2.0, 100.0)));

    ModelSpec ia = ia_model();
    CHECK(cost_weight(ia, kFair) == doctest::Approx(1.0));
    CHECK(cost_weight(ia, kSelfish) == doctest::Approx(8.0));  // 2^(0 + 1*3)
    CHECK(cost_weight(ia, {2, 8}) == doctest::Approx(64.0));   // 2^(1*6 + 0)

    ModelSpec selfish{UtilitySpec::linear(), NormSpec::selfish(),
                      CostFamilySpec::entropy_selfish_exponent(2.0, 100.0)};
    CHECK(cost_weight(selfish, kFair) == doctest::Approx(std::pow(2.0, 0.04)));

    ModelSpec plain{UtilitySpec::linear(), NormSpec::selfish(),
                    CostFamilySpec::constant(CostFamily::entropy, 3.0)};
    CHECK(cost_weight(plain, kSelfish) == doctest::Approx(3.0));
}

TEST_CASE("weight rules reject invalid parameters and domains") {
    CHECK_THROWS_AS(CostFamilySpec::entropy_selfish_exponent(1.0, 100.0), InvalidSpec);
    CHECK_THROWS_AS(CostFamilySpec::entropy_inverse_norm(2.0, 0.0), InvalidSpec);
    CHECK_THROWS_AS(CostFamilySpec::quadratic_fs(2.0, 0.0, 1.0), InvalidSpec);
    CHECK_THROWS_AS(CostFamilySpec::constant(CostFamily::entropy, 0.0), InvalidSpec);

    // inverse-norm weight needs phi > 0
    ModelSpec bad{UtilitySpec::linear(), NormSpec::fehr_schmidt(1.0, 0.5),
                  CostFamilySpec::entropy_inverse_norm(2.0, 100.0)};
    CHECK_THROWS_AS(cost_weight(bad, {2, 8}), NonPositiveNorm);  // phi = -4
}

TEST_CASE("cost values, marginals, and inverses") {
    CHECK(cost_value(CostFamily::entropy, 2.0, 0.5) == doctest::Approx(2.0 * 0.5 * std::log(0.5)));
    CHECK(cost_value(CostFamily::entropy, 2.0, 0.0) == 0.0);  // limit convention
    CHECK(cost_value(CostFamily::entropy, 2.0, 1.0) == 0.0);
    CHECK(cost_value(CostFamily::quadratic, 3.0, 0.5) == doctest::Approx(0.75));
    CHECK_THROWS_AS(cost_value(CostFamily::entropy, 0.0, 0.5), NonPositiveWeight);

    CHECK(cost_marginal(CostFamily::entropy, 2.0, 0.5) ==
          doctest::Approx(2.0 * (std::log(0.5) + 1.0)));
    CHECK(cost_marginal(CostFamily::quadratic, 3.0, 0.5) == doctest::Approx(3.0));
    CHECK_THROWS_AS(cost_marginal(CostFamily::entropy, 2.0, 0.0), DomainError);
    CHECK_THROWS_AS(cost_marginal(CostFamily::entropy, 2.0, 1.0), DomainError);

    CHECK(cost_marginal_inverse(CostFamily::quadratic, 3.0, 3.0) == doctest::Approx(0.5));
    CHECK(cost_marginal_inverse(CostFamily::quadratic, 3.0, -1.0) == 0.0);  // clamp
    CHECK(cost_marginal_inverse(CostFamily::quadratic, 3.0, 100.0) == 1.0);
    CHECK(cost_marginal_inverse(CostFamily::entropy, 2.0, 2.0) == 1.0);  // exponent clamp

    // a huge entropy weight pins the inverse at e^-1 for moderate marginals
    double p = cost_marginal_inverse_logw(CostFamily::entropy, 100.0 * std::log(2.0), 10.0);
    CHECK(p == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("cost value is strictly convex on a grid") {
    for (CostFamily family : {CostFamily::entropy, CostFamily::quadratic}) {
        for (double a : {0.5, 1.0, 16.0}) {
            for (double p = 0.05; p < 0.9; p += 0.1) {
                for (double q = p + 0.1; q < 0.99; q += 0.1) {
                    for (double t : {0.25, 0.5, 0.75}) {
                        double mid = cost_value(family, a, t * p + (1 - t) * q);
                        double chord =
                            t * cost_value(family, a, p) + (1 - t) * cost_value(family, a, q);
                        CHECK(mid < chord);
                    }
                }
            }
        }
    }
}

TEST_CASE("marginal matches finite differences of the value") {
    const double h = 1e-7;
    for (CostFamily family : {CostFamily::entropy, CostFamily::quadratic}) {
        for (double a : {0.5, 2.0, 47.0}) {
            for (double p = 0.01; p <= 0.99; p += 0.07) {
                double fd = (cost_value(family, a, p + h) - cost_value(family, a, p - h)) / (2 * h);
                double m = cost_marginal(family, a, p);
                CHECK(m == doctest::Approx(fd).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("marginal inverse is a left inverse on interior p") {
    for (CostFamily family : {CostFamily::entropy, CostFamily::quadratic}) {
        for (double a : {0.5, 2.0, 16.0}) {
            for (double p = 0.01; p <= 0.99; p += 0.07) {
                double m = cost_marginal(family, a, p);
                CHECK(cost_marginal_inverse(family, a, m) == doctest::Approx(p).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("norms are monotone on fair allocations") {
    UtilitySpec u = UtilitySpec::linear();
    for (const NormSpec& norm :
         {NormSpec::multiplicative(), NormSpec::fehr_schmidt(1.0, 0.5), NormSpec::selfish()}) {
        double prev = eval_norm(norm, u, {0, 0});
        for (double x : {1.0, 2.0, 5.0, 10.0, 20.0}) {
            double cur = eval_norm(norm, u, {x, x});
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("steepness ordering: quadratic globally, entropy only above 1/e") {
    // lower phi must mean steeper marginal cost for randomization toward it
    ModelSpec ia = ia_model();
    auto quad = check_marginal_ordering(ia, {kFair, kSelfish}, {0.1, 0.5, 0.9});
    CHECK(quad.all_pass);

    ModelSpec shame = shame_model();
    auto ent_hi = check_marginal_ordering(shame, {kFair, kSelfish}, {0.5, 0.7, 0.9});
    CHECK(ent_hi.all_pass);  // ln p + 1 > 0 above 1/e preserves the ordering

    auto ent_lo = check_marginal_ordering(shame, {kFair, kSelfish}, {0.1});
    CHECK_FALSE(ent_lo.all_pass);  // ln p + 1 < 0 reverses it below 1/e
    REQUIRE(ent_lo.entries.size() == 1);
    CHECK(ent_lo.entries[0].lower_norm == kSelfish);
    CHECK(ent_lo.entries[0].marginal_lower < ent_lo.entries[0].marginal_higher);

    // and exactly on the documented sub-interval (1/e, 1) the entropy family passes
    std::vector<double> grid;
    for (double p = std::exp(-1.0) + 0.01; p < 1.0; p += 0.05) grid.push_back(p);
    CHECK(check_marginal_ordering(shame, {kFair, kSelfish}, grid).all_pass);
}

TEST_CASE("marginal ordering closed forms match the hand calculation") {
    ModelSpec shame = shame_model();
    auto rep = check_marginal_ordering(shame, {kFair, kSelfish}, {0.5});
    REQUIRE(rep.entries.size() == 1);
    // weights 2^(50/9) ~ 47.06 vs 16; (ln 0.5 + 1) > 0 keeps 47.06(...) > 16(...)
    CHECK(rep.entries[0].marginal_lower ==
          doctest::Approx(std::pow(2.0, 100.0 / 18.0) * (std::log(0.5) + 1.0)));
    CHECK(rep.entries[0].marginal_higher == doctest::Approx(16.0 * (std::log(0.5) + 1.0)));
    CHECK(rep.entries[0].pass);
}
