#include "dbnn/report_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "text_util.hpp"

namespace dbnn {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* status_name(ComparisonStatus status) {
    switch (status) {
        case ComparisonStatus::Ok: return "ok";
        case ComparisonStatus::Flagged: return "flagged";
        case ComparisonStatus::InsufficientSupport: return "insufficient_support";
    }
    return "unknown";
}

ordered_json matrix_to_json(const ConfusionMatrix& matrix) {
    ordered_json rows = ordered_json::array();
    for (std::size_t p = 0; p < matrix.class_count(); ++p) {
        ordered_json row = ordered_json::array();
        for (std::size_t t = 0; t < matrix.class_count(); ++t) row.push_back(matrix.cell(p, t));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string eval_report_to_json(const EvalReport& report) {
    ordered_json j;
    j["classes"] = report.class_names;
    j["accuracy"] = report.accuracy;
    j["matrix"] = matrix_to_json(report.matrix);
    ordered_json preds = ordered_json::array();
    for (const PredictionRecord& rec : report.predictions) {
        preds.push_back(ordered_json{{"row", rec.source_index},
                                     {"true", report.class_names[static_cast<std::size_t>(rec.true_label)]},
                                     {"predicted", report.class_names[static_cast<std::size_t>(rec.predicted)]},
                                     {"confidence", rec.confidence}});
    }
    j["predictions"] = std::move(preds);
    return j.dump(2) + "\n";
}

EvalReport eval_report_from_json(const std::string& text, const std::string& origin) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw Error(origin + ": invalid JSON: " + e.what());
    }

    try {
        EvalReport report;
        report.class_names = j.at("classes").get<std::vector<std::string>>();
        const std::size_t k = report.class_names.size();
        if (k == 0) throw Error(origin + ": empty class list");

        const auto& rows = j.at("matrix");
        if (!rows.is_array() || rows.size() != k) {
            throw Error(origin + ": matrix must be " + std::to_string(k) + "x" + std::to_string(k));
        }
        report.matrix = ConfusionMatrix(k);
        for (std::size_t p = 0; p < k; ++p) {
            if (!rows[p].is_array() || rows[p].size() != k) {
                throw Error(origin + ": matrix must be " + std::to_string(k) + "x" + std::to_string(k));
            }
            for (std::size_t t = 0; t < k; ++t) {
                const std::int64_t v = rows[p][t].get<std::int64_t>();
                if (v < 0) throw Error(origin + ": negative matrix cell");
                report.matrix.add(p, t, v);
            }
        }
        report.accuracy = report.matrix.accuracy_percent();
        if (j.contains("accuracy")) {
            const double stated = j["accuracy"].get<double>();
            if (std::abs(stated - report.accuracy) > 0.01) {
                throw Error(origin + ": stated accuracy " + detail::format_double(stated) +
                            " is inconsistent with the matrix trace (" +
                            detail::format_double(report.accuracy) + ")");
            }
        }

        if (j.contains("predictions")) {
            for (const auto& p : j["predictions"]) {
                PredictionRecord rec;
                rec.source_index = p.at("row").get<std::size_t>();
                const auto true_name = p.at("true").get<std::string>();
                const auto pred_name = p.at("predicted").get<std::string>();
                const auto find = [&](const std::string& name) {
                    for (std::size_t c = 0; c < k; ++c) {
                        if (report.class_names[c] == name) return static_cast<int>(c);
                    }
                    throw Error(origin + ": prediction references unknown class '" + name + "'");
                };
                rec.true_label = find(true_name);
                rec.predicted = find(pred_name);
                rec.confidence = p.at("confidence").get<double>();
                if (!(rec.confidence >= 0.0 && rec.confidence <= 100.0)) {
                    throw Error(origin + ": confidence outside [0, 100]");
                }
                report.predictions.push_back(rec);
            }
        }
        return report;
    } catch (const ordered_json::exception& e) {
        throw Error(origin + ": malformed report: " + e.what());
    }
}

EvalReport read_eval_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return eval_report_from_json(buffer.str(), path);
}

void write_eval_report(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << eval_report_to_json(report);
    if (!out.good()) throw Error("failed writing '" + path + "'");
}

std::string divergence_report_to_json(const DivergenceReport& report) {
    ordered_json j;
    j["tv_threshold"] = report.tv_threshold;
    j["min_support"] = report.min_support;
    ordered_json classes = ordered_json::array();
    for (const ClassComparison& c : report.classes) {
        classes.push_back(ordered_json{{"class", c.class_name},
                                       {"support_synthetic", c.support_synthetic},
                                       {"support_observed", c.support_observed},
                                       {"tv_distance", c.tv_distance},
                                       {"recall_synthetic", c.recall_synthetic},
                                       {"recall_observed", c.recall_observed},
                                       {"status", status_name(c.status)}});
    }
    j["classes"] = std::move(classes);
    j["flagged"] = report.flagged_classes();
    return j.dump(2) + "\n";
}

std::string selection_report_to_json(const SelectionReport& report, const SelectionConfig& config) {
    ordered_json j;
    j["converged"] = report.converged;
    j["rounds"] = report.curve.size();
    j["train_size"] = report.train_indices.size();
    j["test_size"] = report.test_indices.size();
    j["overall_accuracy"] = report.overall_accuracy;
    j["final_train_accuracy"] = report.final_train_accuracy;
    j["final_test_accuracy"] = report.final_test_accuracy;
    j["classes"] = report.model.class_names();
    j["alpha"] = config.alpha;
    j["iterations"] = config.iterations;
    j["seed"] = config.seed;
    j["max_rounds"] = config.max_rounds;
    j["bin_cap"] = config.binning.bin_cap;
    j["train_indices"] = report.train_indices;
    j["train_round_added"] = report.train_round_added;
    j["test_indices"] = report.test_indices;
    return j.dump(2) + "\n";
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "round,train_size,test_size,pseudo_accuracy,real_accuracy\n";
    for (const CurvePoint& p : curve) {
        out += std::to_string(p.round);
        out += ',';
        out += std::to_string(p.train_size);
        out += ',';
        out += std::to_string(p.test_size);
        out += ',';
        out += detail::format_double(p.pseudo_accuracy);
        out += ',';
        out += detail::format_double(p.real_accuracy);
        out += '\n';
    }
    return out;
}

std::string matrix_to_text(const ConfusionMatrix& matrix, const std::vector<std::string>& class_names) {
    const std::size_t k = matrix.class_count();

    std::size_t width = 5;  // fits "Total"
    for (const std::string& name : class_names) width = std::max(width, name.size());
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t t = 0; t < k; ++t) {
            width = std::max(width, std::to_string(matrix.cell(p, t)).size());
        }
    }
    width += 2;

    std::ostringstream out;
    const auto put = [&](const std::string& s) { out << std::setw(static_cast<int>(width)) << s; };

    put("Label");
    for (std::size_t t = 0; t < k; ++t) put(class_names[t]);
    put("Total");
    out << '\n';
    for (std::size_t p = 0; p < k; ++p) {
        put(class_names[p]);
        for (std::size_t t = 0; t < k; ++t) put(std::to_string(matrix.cell(p, t)));
        put(std::to_string(matrix.row_total(p)));
        out << '\n';
    }
    put("Total");
    for (std::size_t t = 0; t < k; ++t) put(std::to_string(matrix.col_total(t)));
    put(std::to_string(matrix.grand_total()));
    out << '\n';
    return out.str();
}

std::string divergence_report_to_text(const DivergenceReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(12) << "class" << std::right << std::setw(12) << "tv_distance"
        << std::setw(14) << "recall_synth" << std::setw(12) << "recall_obs" << std::setw(10) << "support"
        << "  status\n";
    for (const ClassComparison& c : report.classes) {
        std::ostringstream support;
        support << c.support_synthetic << "/" << c.support_observed;
        out << std::left << std::setw(12) << c.class_name << std::right << std::setw(12) << std::fixed
            << std::setprecision(4) << c.tv_distance << std::setw(14) << c.recall_synthetic
            << std::setw(12) << c.recall_observed << std::setw(10) << support.str() << "  "
            << status_name(c.status) << '\n';
    }
    return out.str();
}

}  // namespace dbnn
