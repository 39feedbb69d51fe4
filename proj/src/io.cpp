#include "apusp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace apusp {

using nlohmann::json;

std::optional<OutputFormat> output_format_by_name(const std::string& name) {
    if (name == "json") return OutputFormat::json;
    if (name == "csv") return OutputFormat::csv;
    if (name == "md") return OutputFormat::md;
    return std::nullopt;
}

// ---- model specs -----------------------------------------------------------

namespace {

double require_number(const json& obj, const char* field, const std::string& where) {
    if (!obj.contains(field) || !obj[field].is_number())
        throw InvalidSpec(where + ": field '" + field + "' must be a number");
    return obj[field].get<double>();
}

UtilitySpec parse_utility(const json& j) {
    if (!j.contains("kind")) throw InvalidSpec("utility: field 'kind' is required");
    const json& kind = j["kind"];
    if (kind.is_string()) {
        if (kind == "linear") return UtilitySpec::linear();
        throw InvalidSpec("utility.kind: unknown value '" + kind.get<std::string>() + "'");
    }
    if (kind.is_object() && kind.contains("affine")) {
        const json& a = kind["affine"];
        return UtilitySpec::affine(require_number(a, "slope", "utility.kind.affine"),
                                   require_number(a, "intercept", "utility.kind.affine"));
    }
    throw InvalidSpec("utility.kind: expected \"linear\" or {\"affine\":{...}}");
}

NormSpec parse_norm(const json& j) {
    if (!j.contains("kind")) throw InvalidSpec("norm: field 'kind' is required");
    const json& kind = j["kind"];
    if (kind.is_string()) {
        if (kind == "multiplicative") return NormSpec::multiplicative();
        if (kind == "selfish") return NormSpec::selfish();
        throw InvalidSpec("norm.kind: unknown value '" + kind.get<std::string>() + "'");
    }
    if (kind.is_object() && kind.contains("fehr_schmidt")) {
        const json& f = kind["fehr_schmidt"];
        return NormSpec::fehr_schmidt(require_number(f, "alpha", "norm.kind.fehr_schmidt"),
                                      require_number(f, "beta", "norm.kind.fehr_schmidt"));
    }
    if (kind.is_object() && kind.contains("table")) {
        const json& rows = kind["table"];
        if (!rows.is_array() || rows.empty())
            throw InvalidSpec("norm.kind.table: must be a nonempty array");
        std::vector<std::pair<Allocation, double>> entries;
        for (const auto& row : rows) {
            entries.emplace_back(Allocation{require_number(row, "x1", "norm.kind.table"),
                                            require_number(row, "x2", "norm.kind.table")},
                                 require_number(row, "phi", "norm.kind.table"));
        }
        return NormSpec::table(std::move(entries));
    }
    throw InvalidSpec(
        "norm.kind: expected \"multiplicative\", \"selfish\", {\"fehr_schmidt\":{...}} or "
        "{\"table\":[...]}");
}

CostFamilySpec parse_cost(const json& j) {
    CostFamilySpec spec;
    if (!j.contains("family") || !j["family"].is_string())
        throw InvalidSpec("cost: field 'family' must be \"entropy\" or \"quadratic\"");
    if (j["family"] == "entropy")
        spec.family = CostFamily::entropy;
    else if (j["family"] == "quadratic")
        spec.family = CostFamily::quadratic;
    else
        throw InvalidSpec("cost.family: unknown value '" + j["family"].get<std::string>() + "'");

    if (!j.contains("weight_rule") || !j["weight_rule"].is_object())
        throw InvalidSpec("cost: field 'weight_rule' must be an object");
    const json& w = j["weight_rule"];
    if (w.contains("selfish_exponent")) {
        const json& r = w["selfish_exponent"];
        spec = CostFamilySpec::entropy_selfish_exponent(
            require_number(r, "eta", "cost.weight_rule.selfish_exponent"),
            require_number(r, "gamma", "cost.weight_rule.selfish_exponent"));
    } else if (w.contains("inverse_norm_exponent")) {
        const json& r = w["inverse_norm_exponent"];
        spec = CostFamilySpec::entropy_inverse_norm(
            require_number(r, "eta", "cost.weight_rule.inverse_norm_exponent"),
            require_number(r, "gamma", "cost.weight_rule.inverse_norm_exponent"));
    } else if (w.contains("fs_exponent")) {
        const json& r = w["fs_exponent"];
        spec = CostFamilySpec::quadratic_fs(
            require_number(r, "eta", "cost.weight_rule.fs_exponent"),
            require_number(r, "alpha", "cost.weight_rule.fs_exponent"),
            require_number(r, "beta", "cost.weight_rule.fs_exponent"));
    } else if (w.contains("constant")) {
        const json& r = w["constant"];
        spec.weight_rule =
            WeightRule{WeightRule::Constant{require_number(r, "a", "cost.weight_rule.constant")}};
        if (!(std::get<WeightRule::Constant>(spec.weight_rule.kind).a > 0.0))
            throw InvalidSpec("cost.weight_rule.constant: field 'a' must be > 0");
    } else {
        throw InvalidSpec(
            "cost.weight_rule: expected one of selfish_exponent, inverse_norm_exponent, "
            "fs_exponent, constant");
    }
    // The factory helpers fix the family by convention; restore the requested one.
    spec.family = j["family"] == "entropy" ? CostFamily::entropy : CostFamily::quadratic;
    return spec;
}

}  // namespace

ModelSpec parse_model_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("model config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidSpec("model config must be a JSON object");
    for (const char* field : {"utility", "norm", "cost"})
        if (!j.contains(field)) throw InvalidSpec(std::string("model config: field '") + field +
                                                  "' is required");
    return {parse_utility(j["utility"]), parse_norm(j["norm"]), parse_cost(j["cost"])};
}

ModelSpec load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_json(buf.str());
}

std::string model_to_json(const ModelSpec& model) {
    json j;
    if (model.utility.is_linear())
        j["utility"]["kind"] = "linear";
    else
        j["utility"]["kind"] = {
            {"affine", {{"slope", model.utility.slope}, {"intercept", model.utility.intercept}}}};

    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, NormSpec::Multiplicative>)
                j["norm"]["kind"] = "multiplicative";
            else if constexpr (std::is_same_v<T, NormSpec::Selfish>)
                j["norm"]["kind"] = "selfish";
            else if constexpr (std::is_same_v<T, NormSpec::FehrSchmidt>)
                j["norm"]["kind"] = {{"fehr_schmidt", {{"alpha", k.alpha}, {"beta", k.beta}}}};
            else {
                json rows = json::array();
                for (const auto& [a, phi] : k.entries)
                    rows.push_back({{"x1", a.x1}, {"x2", a.x2}, {"phi", phi}});
                j["norm"]["kind"] = {{"table", rows}};
            }
        },
        model.norm.kind);

    j["cost"]["family"] = model.cost.family == CostFamily::entropy ? "entropy" : "quadratic";
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, WeightRule::SelfishExponent>)
                j["cost"]["weight_rule"] = {
                    {"selfish_exponent", {{"eta", k.eta}, {"gamma", k.gamma}}}};
            else if constexpr (std::is_same_v<T, WeightRule::InverseNormExponent>)
                j["cost"]["weight_rule"] = {
                    {"inverse_norm_exponent", {{"eta", k.eta}, {"gamma", k.gamma}}}};
            else if constexpr (std::is_same_v<T, WeightRule::FsExponent>)
                j["cost"]["weight_rule"] = {
                    {"fs_exponent", {{"eta", k.eta}, {"alpha", k.alpha}, {"beta", k.beta}}}};
            else
                j["cost"]["weight_rule"] = {{"constant", {{"a", k.a}}}};
        },
        model.cost.weight_rule.kind);
    return j.dump(2);
}

// ---- datasets --------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                     : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return fields;
}

double parse_csv_number(const std::string& s, std::size_t row, const char* what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("row " + std::to_string(row) + ": " + what + " '" + s +
                         "' is not a number");
    return v;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

StochasticChoiceDataset parse_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "menu_id,x1,x2,prob")
        throw ParseError("row 1: expected header 'menu_id,x1,x2,prob'");

    // Rows are grouped by menu_id but need not name the real canonical id;
    // each group is re-canonicalized through Menu.
    struct Group {
        std::vector<Allocation> allocs;
        std::vector<double> probs;
        std::size_t first_row;
    };
    std::vector<std::pair<std::string, Group>> groups;  // insertion order
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv_row(line);
        if (fields.size() != 4)
            throw ParseError("row " + std::to_string(row) + ": expected 4 fields, got " +
                             std::to_string(fields.size()));
        double x1 = parse_csv_number(fields[1], row, "x1");
        double x2 = parse_csv_number(fields[2], row, "x2");
        double prob = parse_csv_number(fields[3], row, "prob");
        if (!(prob >= 0.0 && prob <= 1.0))
            throw ParseError("row " + std::to_string(row) + ": prob " + fields[3] +
                             " is outside [0,1]");
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == fields[0]; });
        if (it == groups.end()) {
            groups.push_back({fields[0], {{}, {}, row}});
            it = groups.end() - 1;
        }
        it->second.allocs.push_back({x1, x2});
        it->second.probs.push_back(prob);
    }

    StochasticChoiceDataset ds;
    for (auto& [label, group] : groups) {
        double sum = 0.0;
        for (double p : group.probs) sum += p;
        if (std::abs(sum - 1.0) > 1e-6)
            throw ParseError("row " + std::to_string(group.first_row) + ": probabilities for menu '" +
                             label + "' sum to " + format_payoff(sum) + ", not 1");
        // Normalize away the allowed 1e-6 ingest slack before canonical checks.
        std::vector<Allocation> allocs = group.allocs;
        Menu menu = [&] {
            try {
                return Menu(std::move(allocs));
            } catch (const InvalidSpec& e) {
                throw ParseError("row " + std::to_string(group.first_row) + ": menu '" + label +
                                 "': " + e.what());
            }
        }();
        std::vector<double> probs(menu.size());
        for (std::size_t i = 0; i < group.allocs.size(); ++i)
            probs[menu.index_of(group.allocs[i])] = group.probs[i] / sum;
        ds.add(ChoiceDistribution(menu, std::move(probs)));
    }
    return ds;
}

StochasticChoiceDataset load_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open dataset '" + path + "'");
    return parse_dataset_csv(in);
}

std::string dataset_to_csv(const StochasticChoiceDataset& ds) {
    std::string out = "menu_id,x1,x2,prob\n";
    for (const auto& [id, dist] : ds.entries) {
        for (std::size_t i = 0; i < dist.menu.size(); ++i) {
            const auto& a = dist.menu.allocations()[i];
            out += id + "," + format_payoff(a.x1) + "," + format_payoff(a.x2) + "," +
                   format_payoff(dist.probs[i]) + "\n";
        }
    }
    return out;
}

// ---- solve results ---------------------------------------------------------

std::string solve_result_to_json(const SolveResult& result) {
    json j;
    j["menu_id"] = result.distribution.menu.id();
    j["probs"] = json::array();
    for (std::size_t i = 0; i < result.distribution.menu.size(); ++i) {
        const auto& a = result.distribution.menu.allocations()[i];
        j["probs"].push_back({{"x1", a.x1}, {"x2", a.x2}, {"p", result.distribution.probs[i]}});
    }
    j["lambda"] = result.lambda;
    j["iterations"] = result.iterations;
    j["max_foc_residual"] = result.max_foc_residual;
    return j.dump(2);
}

std::string solve_result_to_csv(const SolveResult& result) {
    std::string out = "menu_id,x1,x2,prob\n";
    const auto& menu = result.distribution.menu;
    for (std::size_t i = 0; i < menu.size(); ++i) {
        const auto& a = menu.allocations()[i];
        out += menu.id() + "," + format_payoff(a.x1) + "," + format_payoff(a.x2) + "," +
               format_payoff(result.distribution.probs[i]) + "\n";
    }
    return out;
}

std::string solve_result_to_md(const SolveResult& result) {
    std::string out;
    out += "| x1 | x2 | prob |\n|---:|---:|---:|\n";
    const auto& menu = result.distribution.menu;
    for (std::size_t i = 0; i < menu.size(); ++i) {
        const auto& a = menu.allocations()[i];
        out += "| " + format_payoff(a.x1) + " | " + format_payoff(a.x2) + " | " +
               format_payoff(result.distribution.probs[i]) + " |\n";
    }
    out += "\nlambda = " + format_payoff(result.lambda) +
           ", iterations = " + std::to_string(result.iterations) +
           ", max FOC residual = " + format_payoff(result.max_foc_residual) + "\n";
    return out;
}

std::string format_solve_result(const SolveResult& result, OutputFormat fmt) {
    switch (fmt) {
        case OutputFormat::json: return solve_result_to_json(result);
        case OutputFormat::csv: return solve_result_to_csv(result);
        default: return solve_result_to_md(result);
    }
}

// ---- audit reports ---------------------------------------------------------

namespace {

json witness_to_json(const Witness& w) {
    json j;
    j["menu_ids"] = w.menu_ids;
    j["allocations"] = json::array();
    for (const auto& a : w.allocations) j["allocations"].push_back({{"x1", a.x1}, {"x2", a.x2}});
    j["probabilities"] = w.probabilities;
    j["detail"] = w.detail;
    return j;
}

}  // namespace

std::string audit_report_to_json(const AuditReport& report) {
    json j;
    j["checks"] = json::array();
    for (const auto& [name, check] : report.checks) {
        json c;
        c["axiom"] = name;
        c["verdict"] = verdict_name(check.verdict);
        c["witnesses"] = json::array();
        for (const auto& w : check.witnesses) c["witnesses"].push_back(witness_to_json(w));
        j["checks"].push_back(std::move(c));
    }
    j["revealed_norm_ranking"] = json::array();
    for (const auto& p : report.revealed.pairs) {
        j["revealed_norm_ranking"].push_back(
            {{"better", {{"x1", p.better.x1}, {"x2", p.better.x2}}},
             {"worse", {{"x1", p.worse.x1}, {"x2", p.worse.x2}}},
             {"base_menu_id", p.base_menu_id},
             {"extended_menu_id", p.extended_menu_id},
             {"prob_base", p.prob_base},
             {"prob_extended", p.prob_extended}});
    }
    j["any_violation"] = report.any_violation();
    return j.dump(2);
}

std::string audit_report_to_md(const AuditReport& report) {
    std::string out = "| axiom | verdict | witnesses |\n|---|---|---:|\n";
    for (const auto& [name, check] : report.checks)
        out += "| " + name + " | " + verdict_name(check.verdict) + " | " +
               std::to_string(check.witnesses.size()) + " |\n";
    for (const auto& [name, check] : report.checks) {
        for (const auto& w : check.witnesses) {
            out += "\n- **" + name + "**: " + w.detail;
            if (!w.menu_ids.empty()) {
                out += " (menus:";
                for (const auto& id : w.menu_ids) out += " {" + id + "}";
                out += ")";
            }
            out += "\n";
        }
    }
    out += "\nrevealed norm ranking: ";
    if (report.revealed.pairs.empty()) {
        out += "(empty)\n";
    } else {
        for (std::size_t i = 0; i < report.revealed.pairs.size(); ++i) {
            const auto& p = report.revealed.pairs[i];
            if (i) out += ", ";
            out += "(" + format_payoff(p.better.x1) + "," + format_payoff(p.better.x2) +
                   ") > (" + format_payoff(p.worse.x1) + "," + format_payoff(p.worse.x2) + ")";
        }
        out += "\n";
    }
    return out;
}

std::string format_audit_report(const AuditReport& report, OutputFormat fmt) {
    if (fmt == OutputFormat::json) return audit_report_to_json(report);
    return audit_report_to_md(report);  // csv falls back to markdown (nested structure)
}

// ---- diff reports ----------------------------------------------------------

namespace {

const char* diff_verdict(const CellDiff& c) {
    return c.cell.annotated() ? "annotated" : (c.pass ? "pass" : "fail");
}

}  // namespace

std::string diff_report_to_json(const DiffReport& report) {
    json j;
    j["table"] = report.table;
    j["column"] = report.column;
    j["tolerance"] = report.tol;
    j["cells"] = json::array();
    for (const auto& c : report.cells) {
        j["cells"].push_back({{"menu_id", c.cell.menu_id},
                              {"x1", c.cell.allocation.x1},
                              {"x2", c.cell.allocation.x2},
                              {"reported", c.cell.value},
                              {"computed", c.computed},
                              {"delta", c.delta},
                              {"verdict", diff_verdict(c)},
                              {"annotation", c.cell.annotated() ? c.cell.tag : ""}});
    }
    j["all_clean"] = report.all_clean();
    return j.dump(2);
}

std::string diff_report_to_csv(const DiffReport& report) {
    std::string out = "menu_id,x1,x2,column,reported,computed,delta,verdict\n";
    for (const auto& c : report.cells)
        out += c.cell.menu_id + "," + format_payoff(c.cell.allocation.x1) + "," +
               format_payoff(c.cell.allocation.x2) + "," + report.column + "," +
               format_payoff(c.cell.value) + "," + format_payoff(c.computed) + "," +
               format_payoff(c.delta) + "," + diff_verdict(c) + "\n";
    return out;
}

std::string diff_report_to_md(const DiffReport& report) {
    std::string out = "### " + report.table + " / " + report.column + " (tol " +
                      format_payoff(report.tol) + ")\n\n";
    out += "| menu | allocation | reported | computed | delta | verdict |\n";
    out += "|---|---|---:|---:|---:|---|\n";
    for (const auto& c : report.cells)
        out += "| {" + c.cell.menu_id + "} | (" + format_payoff(c.cell.allocation.x1) + "," +
               format_payoff(c.cell.allocation.x2) + ") | " + format_payoff(c.cell.value) + " | " +
               format_payoff(c.computed) + " | " + format_payoff(c.delta) + " | " +
               diff_verdict(c) + " |\n";
    bool any_note = false;
    for (const auto& c : report.cells) {
        if (!c.cell.annotated()) continue;
        if (!any_note) {
            out += "\nknown discrepancies:\n";
            any_note = true;
        }
        out += "- {" + c.cell.menu_id + "} (" + format_payoff(c.cell.allocation.x1) + "," +
               format_payoff(c.cell.allocation.x2) + "): " +
               c.cell.tag.substr(c.cell.tag.find(':') + 2) + "\n";
    }
    return out;
}

std::string format_diff_report(const DiffReport& report, OutputFormat fmt) {
    switch (fmt) {
        case OutputFormat::json: return diff_report_to_json(report);
        case OutputFormat::csv: return diff_report_to_csv(report);
        default: return diff_report_to_md(report);
    }
}

// ---- fit results -----------------------------------------------------------

std::string fit_result_to_json(const FitResult& result) {
    json j;
    j["family"] = fit_family_name(result.family);
    j["param_name"] = fit_param_name(result.family);
    j["best_param"] = result.best_param;
    j["best_sse"] = result.best_sse;
    j["grid"] = json::array();
    for (const auto& [param, sse] : result.grid)
        j["grid"].push_back({{"param", param}, {"sse", sse}});
    return j.dump(2);
}

namespace {

std::vector<std::pair<double, double>> grid_by_sse(const FitResult& result) {
    auto rows = result.grid;
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    return rows;
}

}  // namespace

std::string fit_result_to_csv(const FitResult& result) {
    std::string out = std::string(fit_param_name(result.family)) + ",sse\n";
    for (const auto& [param, sse] : grid_by_sse(result))
        out += format_payoff(param) + "," + format_payoff(sse) + "\n";
    return out;
}

std::string fit_result_to_md(const FitResult& result) {
    std::string out = "### fit: " + std::string(fit_family_name(result.family)) + " family\n\n";
    out += "| " + std::string(fit_param_name(result.family)) + " | sse |\n|---:|---:|\n";
    for (const auto& [param, sse] : grid_by_sse(result))
        out += "| " + format_payoff(param) + " | " + format_payoff(sse) + " |\n";
    out += "\nbest " + std::string(fit_param_name(result.family)) + " = " +
           format_payoff(result.best_param) + " (sse " + format_payoff(result.best_sse) + ")\n";
    return out;
}

std::string format_fit_result(const FitResult& result, OutputFormat fmt) {
    switch (fmt) {
        case OutputFormat::json: return fit_result_to_json(result);
        case OutputFormat::csv: return fit_result_to_csv(result);
        default: return fit_result_to_md(result);
    }
}

// ---- reference tables as data ----------------------------------------------

std::string reference_table_to_csv(const ReferenceTable& table) {
    std::string out = "menu_id,x1,x2,column,value,tag\n";
    for (const auto& c : table.cells) {
        std::string tag = c.tag;
        for (char& ch : tag)
            if (ch == ',') ch = ';';
        out += c.menu_id + "," + format_payoff(c.allocation.x1) + "," +
               format_payoff(c.allocation.x2) + "," + c.column + "," + format_payoff(c.value) +
               "," + tag + "\n";
    }
    return out;
}

ReferenceTable parse_reference_table_csv(const std::string& name, std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "menu_id,x1,x2,column,value,tag")
        throw ParseError("row 1: expected header 'menu_id,x1,x2,column,value,tag'");
    ReferenceTable table{name, {}};
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv_row(line);
        if (fields.size() < 6)
            throw ParseError("row " + std::to_string(row) + ": expected 6 fields");
        // The tag may contain ';'-mangled commas; rejoin anything past field 5.
        std::string tag = fields[5];
        for (std::size_t i = 6; i < fields.size(); ++i) tag += "," + fields[i];
        table.cells.push_back({fields[0],
                               {parse_csv_number(fields[1], row, "x1"),
                                parse_csv_number(fields[2], row, "x2")},
                               fields[3],
                               parse_csv_number(fields[4], row, "value"),
                               tag});
    }
    return table;
}

}  // namespace apusp
