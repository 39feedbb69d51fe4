#include "apusp/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace apusp {

namespace {

std::string alloc_str(const Allocation& a) {
    return "(" + format_payoff(a.x1) + "," + format_payoff(a.x2) + ")";
}

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

void StochasticChoiceDataset::add(ChoiceDistribution dist) {
    std::string id = dist.menu.id();
    entries.erase(id);
    entries.emplace(std::move(id), std::move(dist));
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::violated: return "violated";
        default: return "vacuous";
    }
}

bool RevealedNormRelation::contains(const Allocation& better, const Allocation& worse) const {
    return std::any_of(pairs.begin(), pairs.end(), [&](const RevealedPair& p) {
        return p.better == better && p.worse == worse;
    });
}

bool AuditReport::any_violation() const {
    return std::any_of(checks.begin(), checks.end(),
                       [](const auto& c) { return c.second.verdict == Verdict::violated; });
}

CheckResult check_positivity(const StochasticChoiceDataset& ds) {
    if (ds.empty()) return {};
    CheckResult res{Verdict::pass, {}};
    for (const auto& [id, dist] : ds.entries) {
        for (std::size_t i = 0; i < dist.probs.size(); ++i) {
            if (dist.probs[i] <= ds.eps_tie) {
                const auto& a = dist.menu.allocations()[i];
                res.verdict = Verdict::violated;
                res.witnesses.push_back({{id},
                                         {a},
                                         {dist.probs[i]},
                                         "rho" + alloc_str(a) + " = " + num(dist.probs[i]) +
                                             " <= 0 in menu {" + id + "}"});
            }
        }
    }
    return res;
}

CheckResult check_regularity(const StochasticChoiceDataset& ds) {
    CheckResult res;
    for (const auto& [id_a, da] : ds.entries) {
        for (const auto& [id_b, db] : ds.entries) {
            if (id_a == id_b || !da.menu.subset_of(db.menu)) continue;
            if (res.verdict == Verdict::vacuous) res.verdict = Verdict::pass;
            for (std::size_t i = 0; i < da.probs.size(); ++i) {
                const auto& x = da.menu.allocations()[i];
                double pa = da.probs[i];
                double pb = db.prob_of(x);
                if (pa < pb - ds.eps_tie) {
                    res.verdict = Verdict::violated;
                    res.witnesses.push_back({{id_a, id_b},
                                             {x},
                                             {pa, pb},
                                             "rho" + alloc_str(x) + " rises from " + num(pa) +
                                                 " in {" + id_a + "} to " + num(pb) +
                                                 " in superset {" + id_b + "}"});
                }
            }
        }
    }
    return res;
}

namespace {

struct MenuEdge {
    std::size_t from, to;
    Allocation via;
    double p_from, p_to;
};

}  // namespace

CheckResult check_menu_acyclicity(const StochasticChoiceDataset& ds) {
    std::vector<const ChoiceDistribution*> menus;
    for (const auto& [id, dist] : ds.entries) menus.push_back(&dist);
    const std::size_t n = menus.size();
    if (n < 2) return {};

    // strict edge A->B: some shared x has rho(x,A) > rho(x,B); tie edges
    // (equal interior probability) merge menus into one component.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };

    std::vector<MenuEdge> strict;
    bool any_edge = false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            for (std::size_t k = 0; k < menus[i]->menu.size(); ++k) {
                const auto& x = menus[i]->menu.allocations()[k];
                if (!menus[j]->menu.contains(x)) continue;
                double pi = menus[i]->probs[k];
                double pj = menus[j]->prob_of(x);
                if (pi > pj + ds.eps_tie) {
                    strict.push_back({i, j, x, pi, pj});
                    any_edge = true;
                } else if (i < j && std::abs(pi - pj) <= ds.eps_tie && pi > ds.eps_tie &&
                           pi < 1.0 - ds.eps_tie) {
                    parent[find(i)] = find(j);
                    any_edge = true;
                }
            }
        }
    }
    if (!any_edge) return {};

    // Cycle of strict edges over tie-condensed components.
    std::vector<std::vector<std::size_t>> adj(n);  // indices into `strict`
    for (std::size_t e = 0; e < strict.size(); ++e)
        adj[find(strict[e].from)].push_back(e);

    std::vector<int> color(n, 0);  // component state: 0 new, 1 on stack, 2 done
    std::vector<std::size_t> path;  // edge indices on the current DFS path

    CheckResult res{Verdict::pass, {}};
    auto dfs = [&](auto&& self, std::size_t comp) -> bool {
        color[comp] = 1;
        for (std::size_t e : adj[comp]) {
            std::size_t next = find(strict[e].to);
            path.push_back(e);
            if (color[next] == 1) {
                // found a cycle; emit every strict edge from its first visit
                Witness w;
                bool in_cycle = false;
                for (std::size_t pe : path) {
                    if (find(strict[pe].from) == next) in_cycle = true;
                    if (!in_cycle) continue;
                    const auto& edge = strict[pe];
                    w.menu_ids.push_back(menus[edge.from]->menu.id());
                    w.menu_ids.push_back(menus[edge.to]->menu.id());
                    w.allocations.push_back(edge.via);
                    w.probabilities.push_back(edge.p_from);
                    w.probabilities.push_back(edge.p_to);
                    w.detail += (w.detail.empty() ? "" : "; ") + std::string("rho") +
                                alloc_str(edge.via) + ": " + num(edge.p_from) + " in {" +
                                menus[edge.from]->menu.id() + "} > " + num(edge.p_to) + " in {" +
                                menus[edge.to]->menu.id() + "}";
                }
                res.witnesses.push_back(std::move(w));
                path.pop_back();
                return true;
            }
            if (color[next] == 0 && self(self, next)) {
                path.pop_back();
                return true;
            }
            path.pop_back();
        }
        color[comp] = 2;
        return false;
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = find(i);
        if (color[c] == 0 && dfs(dfs, c)) res.verdict = Verdict::violated;
    }
    return res;
}

CheckResult check_selfishness(const StochasticChoiceDataset& ds) {
    CheckResult res;
    for (const auto& [id, dist] : ds.entries) {
        for (std::size_t i = 0; i < dist.probs.size(); ++i) {
            if (dist.probs[i] < 1.0 - ds.eps_tie) continue;
            if (res.verdict == Verdict::vacuous) res.verdict = Verdict::pass;
            const auto& x = dist.menu.allocations()[i];
            for (const auto& y : dist.menu.allocations()) {
                if (y == x) continue;
                if (y.x1 >= x.x1) {
                    res.verdict = Verdict::violated;
                    res.witnesses.push_back(
                        {{id},
                         {x, y},
                         {dist.probs[i]},
                         "rho" + alloc_str(x) + " = 1 in {" + id + "} but " + alloc_str(y) +
                             " has x1 " + num(y.x1) + " >= " + num(x.x1)});
                }
            }
        }
    }
    return res;
}

RevealedNormRelation reveal_norm_ranking(const StochasticChoiceDataset& ds) {
    RevealedNormRelation rel;
    for (const auto& [id_a, da] : ds.entries) {
        for (const auto& [id_b, db] : ds.entries) {
            if (db.menu.size() != da.menu.size() + 1 || !da.menu.subset_of(db.menu)) continue;
            const Allocation* added = nullptr;
            for (const auto& y : db.menu.allocations())
                if (!da.menu.contains(y)) added = &y;
            for (std::size_t i = 0; i < da.probs.size(); ++i) {
                const auto& x = da.menu.allocations()[i];
                double pa = da.probs[i];
                double pb = db.prob_of(x);
                if (pa > pb + ds.eps_tie)
                    rel.pairs.push_back({*added, x, id_a, id_b, pa, pb});
            }
        }
    }
    return rel;
}

CheckResult check_personal_norm_axioms(const RevealedNormRelation& rel,
                                       const StochasticChoiceDataset&) {
    if (rel.pairs.empty()) return {};
    CheckResult res{Verdict::pass, {}};

    for (const auto& p : rel.pairs) {
        if (rel.contains(p.worse, p.better)) {
            res.verdict = Verdict::violated;
            res.witnesses.push_back({{p.base_menu_id, p.extended_menu_id},
                                     {p.better, p.worse},
                                     {p.prob_base, p.prob_extended},
                                     "asymmetry: both " + alloc_str(p.better) + " > " +
                                         alloc_str(p.worse) + " and the reverse are revealed"});
        }
    }

    std::vector<Allocation> support;
    for (const auto& p : rel.pairs)
        for (const auto& a : {p.better, p.worse})
            if (std::find(support.begin(), support.end(), a) == support.end())
                support.push_back(a);

    for (const auto& x : support)
        for (const auto& y : support)
            for (const auto& z : support) {
                if (x == y || y == z || x == z) continue;
                if (!rel.contains(x, y) && !rel.contains(y, z) && rel.contains(x, z)) {
                    res.verdict = Verdict::violated;
                    res.witnesses.push_back(
                        {{},
                         {x, y, z},
                         {},
                         "negative transitivity: " + alloc_str(x) + " !> " + alloc_str(y) +
                             " and " + alloc_str(y) + " !> " + alloc_str(z) + " but " +
                             alloc_str(x) + " > " + alloc_str(z)});
                }
            }

    for (const auto& p : rel.pairs) {
        bool fair = p.better.x1 == p.better.x2 && p.worse.x1 == p.worse.x2;
        if (fair && p.worse.x1 > p.better.x1) {
            res.verdict = Verdict::violated;
            res.witnesses.push_back({{p.base_menu_id, p.extended_menu_id},
                                     {p.better, p.worse},
                                     {p.prob_base, p.prob_extended},
                                     "fair monotonicity: revealed " + alloc_str(p.better) + " > " +
                                         alloc_str(p.worse) + " though " + num(p.worse.x1) +
                                         " > " + num(p.better.x1)});
        }
    }
    return res;
}

CheckResult check_order_independence(const StochasticChoiceDataset& ds) {
    CheckResult res;
    auto sgn = [&](double v) { return v > ds.eps_tie ? 1 : (v < -ds.eps_tie ? -1 : 0); };
    for (const auto& [id1, m1] : ds.entries) {
        for (const auto& [id2, m2] : ds.entries) {
            if (id1 >= id2 || m1.menu.size() != m2.menu.size()) continue;
            std::vector<Allocation> only1, only2, shared;
            for (const auto& a : m1.menu.allocations())
                (m2.menu.contains(a) ? shared : only1).push_back(a);
            for (const auto& a : m2.menu.allocations())
                if (!m1.menu.contains(a)) only2.push_back(a);
            if (only1.size() != 1 || only2.size() != 1 || shared.empty()) continue;
            const Allocation& x = only1.front();
            const Allocation& y = only2.front();
            for (const auto& [id_a, da] : ds.entries) {
                if (!da.menu.contains(x) || !da.menu.contains(y)) continue;
                if (res.verdict == Verdict::vacuous) res.verdict = Verdict::pass;
                double r = da.prob_of(x) - da.prob_of(y);
                for (const auto& z : shared) {
                    double l = m1.prob_of(z) - m2.prob_of(z);
                    bool le = sgn(l) <= 0;   // rho(z, B+{x}) <= rho(z, B+{y})
                    bool ge = sgn(r) >= 0;   // rho(x, A) >= rho(y, A)
                    if (le != ge) {
                        res.verdict = Verdict::violated;
                        res.witnesses.push_back(
                            {{id1, id2, id_a},
                             {x, y, z},
                             {m1.prob_of(z), m2.prob_of(z), da.prob_of(x), da.prob_of(y)},
                             "order independence: rho" + alloc_str(z) + " is " + num(m1.prob_of(z)) +
                                 " with " + alloc_str(x) + " vs " + num(m2.prob_of(z)) + " with " +
                                 alloc_str(y) + ", but rho" + alloc_str(x) + " = " +
                                 num(da.prob_of(x)) + " vs rho" + alloc_str(y) + " = " +
                                 num(da.prob_of(y)) + " in {" + id_a + "}"});
                    }
                }
            }
        }
    }
    return res;
}

CheckResult check_fosd_selfish(const StochasticChoiceDataset& ds) {
    CheckResult res;
    for (const auto& [id, dist] : ds.entries) {
        const auto& allocs = dist.menu.allocations();
        for (std::size_t i = 0; i < allocs.size(); ++i) {
            for (std::size_t j = 0; j < allocs.size(); ++j) {
                if (!(allocs[i].x1 > allocs[j].x1)) continue;
                if (res.verdict == Verdict::vacuous) res.verdict = Verdict::pass;
                if (dist.probs[i] <= dist.probs[j] + ds.eps_tie) {
                    res.verdict = Verdict::violated;
                    res.witnesses.push_back(
                        {{id},
                         {allocs[i], allocs[j]},
                         {dist.probs[i], dist.probs[j]},
                         "FOSD: x1 " + num(allocs[i].x1) + " > " + num(allocs[j].x1) +
                             " but rho " + num(dist.probs[i]) + " <= " + num(dist.probs[j]) +
                             " in {" + id + "}"});
                }
            }
        }
    }
    return res;
}

CheckResult check_deterministic(const StochasticChoiceDataset& ds) {
    if (ds.empty()) return {};
    CheckResult res{Verdict::pass, {}};
    for (const auto& [id, dist] : ds.entries) {
        double top = *std::max_element(dist.probs.begin(), dist.probs.end());
        if (top < 1.0 - ds.eps_tie) {
            res.verdict = Verdict::violated;
            res.witnesses.push_back({{id},
                                     {},
                                     {top},
                                     "menu {" + id + "} has no degenerate probability (max " +
                                         num(top) + ")"});
        }
    }
    return res;
}

CheckResult check_luce_iia(const StochasticChoiceDataset& ds) {
    CheckResult res;
    constexpr double kRelTol = 1e-6;
    for (const auto& [id_a, da] : ds.entries) {
        for (const auto& [id_b, db] : ds.entries) {
            if (id_a >= id_b) continue;
            for (std::size_t i = 0; i < da.menu.size(); ++i) {
                for (std::size_t j = i + 1; j < da.menu.size(); ++j) {
                    const auto& x = da.menu.allocations()[i];
                    const auto& y = da.menu.allocations()[j];
                    if (!db.menu.contains(x) || !db.menu.contains(y)) continue;
                    double px_a = da.probs[i], py_a = da.probs[j];
                    double px_b = db.prob_of(x), py_b = db.prob_of(y);
                    if (px_a <= ds.eps_tie || py_a <= ds.eps_tie || px_b <= ds.eps_tie ||
                        py_b <= ds.eps_tie)
                        continue;
                    if (res.verdict == Verdict::vacuous) res.verdict = Verdict::pass;
                    double r_a = px_a / py_a;
                    double r_b = px_b / py_b;
                    if (std::abs(r_a / r_b - 1.0) > kRelTol) {
                        res.verdict = Verdict::violated;
                        res.witnesses.push_back(
                            {{id_a, id_b},
                             {x, y},
                             {px_a, py_a, px_b, py_b},
                             "odds " + alloc_str(x) + ":" + alloc_str(y) + " = " + num(r_a) +
                                 " in {" + id_a + "} vs " + num(r_b) + " in {" + id_b + "}"});
                    }
                }
            }
        }
    }
    return res;
}

AuditReport audit_all(const StochasticChoiceDataset& ds) {
    AuditReport report;
    report.revealed = reveal_norm_ranking(ds);
    report.checks.emplace_back("positivity", check_positivity(ds));
    report.checks.emplace_back("regularity", check_regularity(ds));
    report.checks.emplace_back("menu_acyclicity", check_menu_acyclicity(ds));
    report.checks.emplace_back("selfishness", check_selfishness(ds));
    report.checks.emplace_back("personal_norm", check_personal_norm_axioms(report.revealed, ds));
    report.checks.emplace_back("order_independence", check_order_independence(ds));
    report.checks.emplace_back("fosd_selfish", check_fosd_selfish(ds));
    report.checks.emplace_back("deterministic", check_deterministic(ds));
    report.checks.emplace_back("luce_iia", check_luce_iia(ds));
    return report;
}

}  // namespace apusp
