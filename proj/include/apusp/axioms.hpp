#pragma once

#include <map>
#include <string>
#include <vector>

#include "apusp/allocation.hpp"

namespace apusp {

// Observed stochastic choice data: canonical menu id -> distribution.
// Probabilities within eps_tie of 0 or 1 are treated as exactly 0 or 1 for
// axiom purposes.
struct StochasticChoiceDataset {
    std::map<std::string, ChoiceDistribution> entries;
    double eps_tie = 1e-9;

    void add(ChoiceDistribution dist);
    bool empty() const { return entries.empty(); }
};

enum class Verdict { pass, violated, vacuous };

const char* verdict_name(Verdict v);

// Everything a violation needs to be re-verified against the raw dataset.
struct Witness {
    std::vector<std::string> menu_ids;
    std::vector<Allocation> allocations;
    std::vector<double> probabilities;
    std::string detail;
};

struct CheckResult {
    Verdict verdict = Verdict::vacuous;
    std::vector<Witness> witnesses;
};

// y normatively better than x, revealed by a probability drop when y joins.
struct RevealedPair {
    Allocation better;
    Allocation worse;
    std::string base_menu_id;      // A
    std::string extended_menu_id;  // A + {better}
    double prob_base;              // rho(worse, A)
    double prob_extended;          // rho(worse, A + {better})
};

struct RevealedNormRelation {
    std::vector<RevealedPair> pairs;
    bool contains(const Allocation& better, const Allocation& worse) const;
};

struct AuditReport {
    std::vector<std::pair<std::string, CheckResult>> checks;  // axiom declaration order
    RevealedNormRelation revealed;
    bool any_violation() const;
};

CheckResult check_positivity(const StochasticChoiceDataset& ds);
CheckResult check_regularity(const StochasticChoiceDataset& ds);
CheckResult check_menu_acyclicity(const StochasticChoiceDataset& ds);
CheckResult check_selfishness(const StochasticChoiceDataset& ds);
RevealedNormRelation reveal_norm_ranking(const StochasticChoiceDataset& ds);
CheckResult check_personal_norm_axioms(const RevealedNormRelation& rel,
                                       const StochasticChoiceDataset& ds);
CheckResult check_order_independence(const StochasticChoiceDataset& ds);
CheckResult check_fosd_selfish(const StochasticChoiceDataset& ds);
CheckResult check_deterministic(const StochasticChoiceDataset& ds);
CheckResult check_luce_iia(const StochasticChoiceDataset& ds);

AuditReport audit_all(const StochasticChoiceDataset& ds);

}  // namespace apusp
