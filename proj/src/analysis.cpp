#include "apusp/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace apusp {

// ---- built-in models -------------------------------------------------------

ModelSpec preset_table1_selfish() {
    return {UtilitySpec::linear(), NormSpec::selfish(),
            CostFamilySpec::entropy_selfish_exponent(2.0, 100.0)};
}

ModelSpec preset_sec33_ia() {
    // The fs weight exponent uses alpha = beta = 1; the norm's beta parameter
    // is constrained to (0,1), so the preset carries beta = 0.5 there.
    return {UtilitySpec::linear(), NormSpec::fehr_schmidt(1.0, 0.5),
            CostFamilySpec::quadratic_fs(2.0, 1.0, 1.0)};
}

ModelSpec preset_sec33_shame() {
    return {UtilitySpec::linear(), NormSpec::multiplicative(),
            CostFamilySpec::entropy_inverse_norm(2.0, 100.0)};
}

std::optional<ModelSpec> preset_by_name(const std::string& name) {
    if (name == "table1-selfish") return preset_table1_selfish();
    if (name == "sec33-ia") return preset_sec33_ia();
    if (name == "sec33-shame") return preset_sec33_shame();
    return std::nullopt;
}

std::vector<std::string> preset_names() {
    return {"table1-selfish", "sec33-ia", "sec33-shame"};
}

// ---- reference tables ------------------------------------------------------

std::vector<Menu> ReferenceTable::menus() const {
    std::vector<Menu> out;
    for (const auto& cell : cells) {
        Menu m = parse_menu_literal(cell.menu_id);
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    return out;
}

std::vector<std::string> ReferenceTable::columns() const {
    std::vector<std::string> out;
    for (const auto& cell : cells)
        if (std::find(out.begin(), out.end(), cell.column) == out.end()) out.push_back(cell.column);
    return out;
}

namespace {

ReferenceTable build_table1() {
    ReferenceTable t{"table1", {}};
    auto add = [&](const std::string& id, Allocation a, double v) {
        t.cells.push_back({id, a, "selfishness", v, "verified"});
    };
    add("5:2,4:4", {4, 4}, 0.2753);
    add("5:2,4:4", {5, 2}, 0.7247);
    add("6:1,5:2,4:4", {4, 4}, 0.0944);
    add("6:1,5:2,4:4", {5, 2}, 0.2504);
    add("6:1,5:2,4:4", {6, 1}, 0.6552);
    return t;
}

ReferenceTable build_sec33() {
    ReferenceTable t{"sec33", {}};
    auto add = [&](const std::string& id, Allocation a, const std::string& col, double v,
                   std::string tag = "verified") {
        t.cells.push_back({id, a, col, v, std::move(tag)});
    };
    add("5:2,4:4", {4, 4}, "ia", 0.8333);
    add("5:2,4:4", {5, 2}, "ia", 0.1667);
    add("6:1,5:2,4:4", {4, 4}, "ia", 0.7838);
    add("6:1,5:2,4:4", {5, 2}, "ia", 0.1605);
    add("6:1,5:2,4:4", {6, 1}, "ia", 0.0557);
    add("5:2,4:4", {4, 4}, "shame", 0.5651);
    add("5:2,4:4", {5, 2}, "shame", 0.4379,
        "annotated: printed pair sums to 1.003; normalization gives 0.4349");
    add("6:1,5:2,4:4", {4, 4}, "shame", 0.2901);
    add("6:1,5:2,4:4", {5, 2}, "shame", 0.3466);
    add("6:1,5:2,4:4", {6, 1}, "shame", 0.3633);
    return t;
}

ReferenceTable build_table2() {
    ReferenceTable t{"table2", {}};
    const std::string swap_a =
        "annotated: value appears swapped with the {(20,0),(0,0)} row; equal own payoffs give 0.5";
    const std::string swap_b =
        "annotated: value appears swapped with the {(0,20),(0,10)} row; a 20-vs-0 own-payoff gap "
        "gives ~1";
    const std::string displaced =
        "annotated: closed-form solution gives ~0.9995; the printed 0.8766 matches the "
        "{(4,16),(2,8)} row instead";
    const std::string displaced_rev =
        "annotated: closed-form solution gives ~0.8766; the printed 1 appears displaced from this "
        "row";
    const std::string tenfold =
        "annotated: differs from the closed-form solution by exactly a factor of ten";
    const std::string shame_zero =
        "annotated: phi(0,0) = 1 makes that weight 2^100, pinning rho(0,0) at 1/e; the left "
        "probability is then ~0.632, not 0.5";

    struct Row {
        const char* id;
        Allocation left;
        double selfishness;
        std::string self_tag;
        double ia;
        std::string ia_tag;
        double shame;
        std::string shame_tag;
    };
    const std::string ok = "verified";
    std::vector<Row> rows = {
        {"20:0,0:20", {20, 0}, 1, ok, 0.5, ok, 0.676, ok},
        {"16:4,4:16", {16, 4}, 1, ok, 0.5, ok, 0.995, ok},
        {"0:20,0:0", {0, 20}, 0.5, ok, 0, ok, 0.5, shame_zero},
        {"4:16,0:0", {4, 16}, 0.9815, ok, 0.0007, ok, 0.5, shame_zero},
        {"0:20,0:10", {0, 20}, 1, swap_a, 0.001, ok, 0.622, ok},
        {"4:16,2:8", {4, 16}, 1, displaced_rev, 0.156, tenfold, 0.6516, ok},
        {"20:0,0:0", {20, 0}, 0.5, swap_b, 0, ok, 0.5, shame_zero},
        {"16:4,8:2", {16, 4}, 0.8766, displaced, 0.163, tenfold, 0.7735, ok},
        {"20:0,10:0", {20, 0}, 0.9995, ok, 0.001, ok, 0.629, ok},
        {"16:4,0:0", {16, 4}, 0.9999, ok, 0.0022, ok, 0.5, shame_zero},
        {"10:10,0:0", {10, 10}, 1, ok, 1, ok, 0.5, shame_zero},
    };
    for (const auto& r : rows) {
        t.cells.push_back({r.id, r.left, "selfishness", r.selfishness, r.self_tag});
        t.cells.push_back({r.id, r.left, "ia", r.ia, r.ia_tag});
        t.cells.push_back({r.id, r.left, "shame", r.shame, r.shame_tag});
    }
    return t;
}

}  // namespace

const ReferenceTable& reference_table1() {
    static const ReferenceTable t = build_table1();
    return t;
}
const ReferenceTable& reference_sec33() {
    static const ReferenceTable t = build_sec33();
    return t;
}
const ReferenceTable& reference_table2() {
    static const ReferenceTable t = build_table2();
    return t;
}

std::optional<std::reference_wrapper<const ReferenceTable>> reference_by_name(
    const std::string& name) {
    if (name == "table1") return std::cref(reference_table1());
    if (name == "sec33") return std::cref(reference_sec33());
    if (name == "table2") return std::cref(reference_table2());
    return std::nullopt;
}

ModelSpec model_for_column(const std::string& column) {
    if (column == "selfishness") return preset_table1_selfish();
    if (column == "ia") return preset_sec33_ia();
    if (column == "shame") return preset_sec33_shame();
    throw InvalidSpec("unknown reference column '" + column + "'");
}

bool DiffReport::all_clean() const {
    return std::all_of(cells.begin(), cells.end(),
                       [](const CellDiff& c) { return c.pass || c.cell.annotated(); });
}

DiffReport compare_to_reference(const StochasticChoiceMap& computed, const ReferenceTable& ref,
                                const std::string& column, double tol) {
    DiffReport report{ref.name, column, tol, {}};
    for (const auto& cell : ref.cells) {
        if (cell.column != column) continue;
        Menu menu = parse_menu_literal(cell.menu_id);
        auto it = computed.find(menu.id());
        if (it == computed.end())
            throw MissingMenu("reference menu {" + menu.id() + "} missing from computed dataset");
        double value = it->second.prob_of(cell.allocation);
        double delta = value - cell.value;
        report.cells.push_back({cell, value, delta, std::abs(delta) <= tol});
    }
    return report;
}

// ---- finite-sample layer ---------------------------------------------------

namespace {

// splitmix64; a pure function of (seed, counter)
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t h = mix64(seed * 0x632be59bd9b4e019ULL + mix64(counter));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<std::int64_t> sample_draws(const ChoiceDistribution& dist, std::int64_t n,
                                       std::uint64_t seed) {
    if (n < 0) throw InvalidSpec("sample size must be >= 0");
    std::vector<double> cdf(dist.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        acc += dist.probs[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    std::vector<std::int64_t> counts(dist.probs.size(), 0);
    for (std::int64_t k = 0; k < n; ++k) {
        double u = uniform01(seed, static_cast<std::uint64_t>(k));
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        ++counts[std::min<std::size_t>(it - cdf.begin(), counts.size() - 1)];
    }
    return counts;
}

CompromiseTestResult compromise_test(std::int64_t n_x, std::int64_t n_y, double sig) {
    if (n_x < 0 || n_y < 0) throw InvalidSpec("counts must be nonnegative");
    const std::int64_t n = n_x + n_y;
    if (n == 0) throw EmptySample("compromise test needs at least one x-or-y draw");

    // exact binomial tail P(Bin(n, 1/2) >= n_y)
    long double tail = 0.0L;
    long double log_half = std::log(0.5L);
    for (std::int64_t k = n_y; k <= n; ++k) {
        long double log_pmf = std::lgammal(n + 1.0L) - std::lgammal(k + 1.0L) -
                              std::lgammal(n - k + 1.0L) + n * log_half;
        tail += std::expl(log_pmf);
    }
    double p = std::min(1.0, static_cast<double>(tail));
    return {p, p <= sig};
}

// ---- parametric fitting ----------------------------------------------------

std::optional<FitFamily> fit_family_by_name(const std::string& name) {
    if (name == "shame") return FitFamily::shame;
    if (name == "ia") return FitFamily::ia;
    if (name == "selfish") return FitFamily::selfish;
    return std::nullopt;
}

const char* fit_family_name(FitFamily f) {
    switch (f) {
        case FitFamily::shame: return "shame";
        case FitFamily::ia: return "ia";
        default: return "selfish";
    }
}

const char* fit_param_name(FitFamily f) {
    return f == FitFamily::ia ? "eta" : "gamma";
}

ModelSpec fit_model(FitFamily family, double param) {
    switch (family) {
        case FitFamily::shame:
            return {UtilitySpec::linear(), NormSpec::multiplicative(),
                    CostFamilySpec::entropy_inverse_norm(2.0, param)};
        case FitFamily::ia:
            return {UtilitySpec::linear(), NormSpec::fehr_schmidt(1.0, 0.5),
                    CostFamilySpec::quadratic_fs(param, 1.0, 1.0)};
        default:
            return {UtilitySpec::linear(), NormSpec::selfish(),
                    CostFamilySpec::entropy_selfish_exponent(2.0, param)};
    }
}

FitResult fit_cost_family(const StochasticChoiceDataset& ds, FitFamily family,
                          const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidSpec("fit grid must be nonempty");
    std::vector<Menu> menus;
    for (const auto& [id, dist] : ds.entries) menus.push_back(dist.menu);

    FitResult result{family, grid.front(), std::numeric_limits<double>::infinity(), {}};
    for (double param : grid) {
        ModelSpec model;
        try {
            model = fit_model(family, param);
        } catch (const Error& e) {
            throw InvalidSpec("grid point " + format_payoff(param) + ": " + e.what());
        }
        double sse = 0.0;
        for (const auto& menu : menus) {
            try {
                SolveResult solved = solve_menu(model, menu);
                const auto& observed = ds.entries.at(menu.id());
                for (std::size_t i = 0; i < menu.size(); ++i) {
                    double d = solved.distribution.probs[i] - observed.probs[i];
                    sse += d * d;
                }
            } catch (const NonConvergence& e) {
                throw NonConvergence("grid point " + format_payoff(param) + ", menu {" +
                                     menu.id() + "}: " + e.what());
            }
        }
        result.grid.emplace_back(param, sse);
        if (sse < result.best_sse) {
            result.best_sse = sse;
            result.best_param = param;
        }
    }
    return result;
}

std::vector<double> parse_grid_range(const std::string& spec) {
    auto parse_num = [&](const std::string& s) {
        double v = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw ParseError("grid range component '" + s + "' is not a number");
        return v;
    };
    std::size_t c1 = spec.find(':');
    std::size_t c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ParseError("grid range '" + spec + "' is not of the form lo:hi:step");
    double lo = parse_num(spec.substr(0, c1));
    double hi = parse_num(spec.substr(c1 + 1, c2 - c1 - 1));
    double step = parse_num(spec.substr(c2 + 1));
    if (!(step > 0.0)) throw ParseError("grid step must be > 0");
    std::vector<double> grid;
    for (double v = lo; v <= hi + 1e-12 * std::abs(step); v += step) grid.push_back(v);
    return grid;
}

}  // namespace apusp
