#pragma once

#include <iosfwd>
#include <string>

#include "apusp/analysis.hpp"

namespace apusp {

enum class OutputFormat { json, csv, md };

std::optional<OutputFormat> output_format_by_name(const std::string& name);

// ---- model specs -----------------------------------------------------------
// {"utility":{"kind":"linear"|{"affine":{...}}},
//  "norm":{"kind":"multiplicative"|{"fehr_schmidt":{...}}|"selfish"|{"table":[...]}},
//  "cost":{"family":"entropy"|"quadratic","weight_rule":{...}}}
ModelSpec parse_model_json(const std::string& text);
ModelSpec load_model_file(const std::string& path);
std::string model_to_json(const ModelSpec& model);

// ---- datasets --------------------------------------------------------------
// CSV contract: header `menu_id,x1,x2,prob`, one row per (menu, allocation);
// per-menu probabilities must sum to 1 +/- 1e-6. Errors carry the row number.
StochasticChoiceDataset parse_dataset_csv(std::istream& in);
StochasticChoiceDataset load_dataset_file(const std::string& path);
std::string dataset_to_csv(const StochasticChoiceDataset& ds);

// ---- reports ---------------------------------------------------------------
std::string solve_result_to_json(const SolveResult& result);
std::string solve_result_to_csv(const SolveResult& result);
std::string solve_result_to_md(const SolveResult& result);
std::string format_solve_result(const SolveResult& result, OutputFormat fmt);

std::string audit_report_to_json(const AuditReport& report);
std::string audit_report_to_md(const AuditReport& report);
std::string format_audit_report(const AuditReport& report, OutputFormat fmt);

std::string diff_report_to_json(const DiffReport& report);
std::string diff_report_to_csv(const DiffReport& report);
std::string diff_report_to_md(const DiffReport& report);
std::string format_diff_report(const DiffReport& report, OutputFormat fmt);

std::string fit_result_to_json(const FitResult& result);
std::string fit_result_to_csv(const FitResult& result);
std::string fit_result_to_md(const FitResult& result);
std::string format_fit_result(const FitResult& result, OutputFormat fmt);

// ---- reference tables as data ----------------------------------------------
// CSV: menu_id,x1,x2,column,value,tag
std::string reference_table_to_csv(const ReferenceTable& table);
ReferenceTable parse_reference_table_csv(const std::string& name, std::istream& in);

}  // namespace apusp
