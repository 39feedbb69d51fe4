#include "apusp/allocation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace apusp {

bool alloc_before(const Allocation& a, const Allocation& b) {
    if (a.x1 != b.x1) return a.x1 > b.x1;
    return a.x2 > b.x2;
}

std::string format_payoff(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Menu::Menu(std::vector<Allocation> allocations) : allocs_(std::move(allocations)) {
    if (allocs_.empty()) throw InvalidSpec("menu must be nonempty");
    for (const auto& a : allocs_) {
        if (!std::isfinite(a.x1) || !std::isfinite(a.x2))
            throw InvalidSpec("allocation payoffs must be finite");
    }
    std::sort(allocs_.begin(), allocs_.end(), alloc_before);
    for (std::size_t i = 1; i < allocs_.size(); ++i) {
        if (allocs_[i] == allocs_[i - 1])
            throw InvalidSpec("menu contains duplicate allocation " + format_payoff(allocs_[i].x1) +
                              ":" + format_payoff(allocs_[i].x2));
    }
    for (std::size_t i = 0; i < allocs_.size(); ++i) {
        if (i) id_ += ',';
        id_ += format_payoff(allocs_[i].x1) + ":" + format_payoff(allocs_[i].x2);
    }
}

bool Menu::contains(const Allocation& a) const {
    return std::find(allocs_.begin(), allocs_.end(), a) != allocs_.end();
}

std::size_t Menu::index_of(const Allocation& a) const {
    auto it = std::find(allocs_.begin(), allocs_.end(), a);
    if (it == allocs_.end())
        throw MenuMismatch("allocation " + format_payoff(a.x1) + ":" + format_payoff(a.x2) +
                           " not in menu " + id_);
    return static_cast<std::size_t>(it - allocs_.begin());
}

bool Menu::subset_of(const Menu& other) const {
    return std::all_of(allocs_.begin(), allocs_.end(),
                       [&](const Allocation& a) { return other.contains(a); });
}

ChoiceDistribution::ChoiceDistribution(Menu m, std::vector<double> p)
    : menu(std::move(m)), probs(std::move(p)) {
    if (probs.size() != menu.size())
        throw MenuMismatch("distribution length does not match menu " + menu.id());
    double sum = 0.0;
    for (double q : probs) {
        if (!(q >= -1e-12 && q <= 1.0 + 1e-12))
            throw InvalidSpec("probability out of [0,1] in menu " + menu.id());
        sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidSpec("probabilities for menu " + menu.id() + " sum to " +
                          format_payoff(sum) + ", not 1");
}

Menu parse_menu_literal(const std::string& text) {
    std::vector<Allocation> allocs;
    std::size_t pos = 0, token = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        ++token;
        std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw ParseError("menu token " + std::to_string(token) + " ('" + item +
                             "') is not of the form x1:x2");
        auto parse_num = [&](const std::string& s) {
            double v = 0.0;
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw ParseError("menu token " + std::to_string(token) + ": '" + s +
                                 "' is not a decimal payoff");
            return v;
        };
        allocs.push_back({parse_num(item.substr(0, colon)), parse_num(item.substr(colon + 1))});
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return Menu(std::move(allocs));
}

}  // namespace apusp
