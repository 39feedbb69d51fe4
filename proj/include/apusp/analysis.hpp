#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "apusp/axioms.hpp"
#include "apusp/solver.hpp"

namespace apusp {

// ---- built-in models -------------------------------------------------------

// Presets mirror the published parameterizations exactly.
ModelSpec preset_table1_selfish();  // linear u, entropy, eta^(u/100) weights
ModelSpec preset_sec33_ia();        // linear u, quadratic, eta^(envy+guilt) weights
ModelSpec preset_sec33_shame();     // linear u, entropy, eta^(100/phi) weights
std::optional<ModelSpec> preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

// ---- reference tables ------------------------------------------------------

struct ReferenceCell {
    std::string menu_id;
    Allocation allocation;
    std::string column;   // selfishness | ia | shame
    double value;         // as printed in the source
    std::string tag;      // "verified" or "annotated:<why the cell is not reproducible>"

    bool annotated() const { return tag.rfind("annotated", 0) == 0; }
};

struct ReferenceTable {
    std::string name;
    std::vector<ReferenceCell> cells;
    std::vector<Menu> menus() const;
    std::vector<std::string> columns() const;
};

const ReferenceTable& reference_table1();
const ReferenceTable& reference_sec33();
const ReferenceTable& reference_table2();
std::optional<std::reference_wrapper<const ReferenceTable>> reference_by_name(
    const std::string& name);

// Model used to reproduce one column of a reference table.
ModelSpec model_for_column(const std::string& column);

struct CellDiff {
    ReferenceCell cell;
    double computed;
    double delta;
    bool pass;  // |delta| <= tol; annotated cells never gate
};

struct DiffReport {
    std::string table;
    std::string column;
    double tol;
    std::vector<CellDiff> cells;
    bool all_clean() const;  // every non-annotated cell passes
};

DiffReport compare_to_reference(const StochasticChoiceMap& computed, const ReferenceTable& ref,
                                const std::string& column, double tol);

// ---- finite-sample layer ---------------------------------------------------

// Inverse-CDF sampling over canonical allocation order. Counter-based RNG:
// draw k depends only on (seed, k), so parallel sampling stays deterministic.
std::vector<std::int64_t> sample_draws(const ChoiceDistribution& dist, std::int64_t n,
                                       std::uint64_t seed);

struct CompromiseTestResult {
    double p_value;
    bool reject;
};

// One-sided exact binomial test of H0: rho(x,B) > rho(y,B) against
// H1: rho(x,B) <= rho(y,B), conditional on the draws that picked x or y
// (so the H0 boundary is p = 1/2). p = P(Bin(n_x+n_y, 1/2) >= n_y).
CompromiseTestResult compromise_test(std::int64_t n_x, std::int64_t n_y, double sig = 0.05);

// ---- parametric fitting ----------------------------------------------------

enum class FitFamily { shame, ia, selfish };

std::optional<FitFamily> fit_family_by_name(const std::string& name);
const char* fit_family_name(FitFamily f);
const char* fit_param_name(FitFamily f);  // gamma for shame/selfish, eta for ia

ModelSpec fit_model(FitFamily family, double param);

struct FitResult {
    FitFamily family;
    double best_param;
    double best_sse;
    std::vector<std::pair<double, double>> grid;  // (param, sse) in grid order
};

// Solves every dataset menu at each grid point and accumulates squared
// probability errors; ties broken by first grid order.
FitResult fit_cost_family(const StochasticChoiceDataset& ds, FitFamily family,
                          const std::vector<double>& grid);

// "lo:hi:step" inclusive; empty result if lo > hi.
std::vector<double> parse_grid_range(const std::string& spec);

}  // namespace apusp
