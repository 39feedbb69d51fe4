#pragma once

#include <string>
#include <vector>

#include "apusp/errors.hpp"

namespace apusp {

// Payoff pair (decision-maker, recipient). Equality is exact on the input
// decimal values; datasets reference allocations symbolically.
struct Allocation {
    double x1 = 0.0;
    double x2 = 0.0;

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

// x1 descending, then x2 descending. The canonical menu order.
bool alloc_before(const Allocation& a, const Allocation& b);

// Shortest round-trip decimal text for a payoff ("4", "2.5", ...).
std::string format_payoff(double v);

// Finite nonempty set of distinct allocations, canonicalized by sorting.
// Two menus with the same allocation set compare equal and share an id.
class Menu {
public:
    explicit Menu(std::vector<Allocation> allocations);

    const std::vector<Allocation>& allocations() const { return allocs_; }
    const std::string& id() const { return id_; }
    std::size_t size() const { return allocs_.size(); }

    bool contains(const Allocation& a) const;
    // Index in canonical order; throws MissingMenu-style error if absent.
    std::size_t index_of(const Allocation& a) const;
    bool subset_of(const Menu& other) const;

    friend bool operator==(const Menu& a, const Menu& b) { return a.id_ == b.id_; }
    friend bool operator<(const Menu& a, const Menu& b) { return a.id_ < b.id_; }

private:
    std::vector<Allocation> allocs_;
    std::string id_;
};

// Probabilities aligned with the menu's canonical order.
struct ChoiceDistribution {
    Menu menu;
    std::vector<double> probs;

    ChoiceDistribution(Menu m, std::vector<double> p);

    double prob_of(const Allocation& a) const { return probs[menu.index_of(a)]; }
};

// "x1:x2,x1:x2" with decimal payoffs; order is re-canonicalized after parse.
Menu parse_menu_literal(const std::string& text);

}  // namespace apusp
