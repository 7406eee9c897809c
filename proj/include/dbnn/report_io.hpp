#pragma once

#include <string>
#include <vector>

#include "dbnn/eval.hpp"
#include "dbnn/odsa.hpp"

namespace dbnn {

// JSON emission/parsing for reports plus the plain-text table and CSV
// formats the CLI writes. All emitters are deterministic: identical inputs
// produce identical bytes.

std::string eval_report_to_json(const EvalReport& report);
EvalReport eval_report_from_json(const std::string& text, const std::string& origin);
EvalReport read_eval_report(const std::string& path);
void write_eval_report(const EvalReport& report, const std::string& path);

std::string divergence_report_to_json(const DivergenceReport& report);

std::string selection_report_to_json(const SelectionReport& report, const SelectionConfig& config);

// Columns: round,train_size,test_size,pseudo_accuracy,real_accuracy.
std::string curve_to_csv(const std::vector<CurvePoint>& curve);

// Aligned table, rows = network labels, columns = data labels, with totals.
std::string matrix_to_text(const ConfusionMatrix& matrix, const std::vector<std::string>& class_names);

std::string divergence_report_to_text(const DivergenceReport& report);

}  // namespace dbnn
