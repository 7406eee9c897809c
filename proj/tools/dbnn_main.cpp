// Command-line front end: train / select / evaluate / predict / compare.
//
// Exit codes: 0 success (including flagged non-convergence), 1 usage error,
// 2 data or validation error.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "dbnn/dataset.hpp"
#include "dbnn/eval.hpp"
#include "dbnn/model.hpp"
#include "dbnn/odsa.hpp"
#include "dbnn/report_io.hpp"

namespace {

struct DataFlags {
    std::string header = "auto";
    std::string class_column = "last";
    std::vector<std::string> classes;
};

struct ModelFlags {
    double alpha = 0.9;
    int iterations = 10;
    std::size_t bin_cap = 32;
    std::vector<std::string> bins;  // feature=count pairs
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
    cmd->add_option("--header", flags.header, "Header line handling")
        ->check(CLI::IsMember({"auto", "yes", "no"}))
        ->capture_default_str();
    cmd->add_option("--class-column", flags.class_column, "Position of the class column")
        ->check(CLI::IsMember({"last", "first"}))
        ->capture_default_str();
    cmd->add_option("--classes", flags.classes,
                    "Explicit comma-separated class list; pins ids and rejects other tokens")
        ->delimiter(',');
}

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
    cmd->add_option("--alpha", flags.alpha, "Boost increment factor, in (0, 1]")
        ->check(CLI::Range(std::numeric_limits<double>::min(), 1.0))
        ->capture_default_str();
    cmd->add_option("--iterations", flags.iterations, "Boosting passes over the training data")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--bin-cap", flags.bin_cap, "Upper bound for inferred per-feature bin counts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--bins", flags.bins,
                    "Per-feature bin overrides as feature=count pairs, e.g. --bins 0=12,3=8")
        ->delimiter(',');
}

dbnn::IngestOptions ingest_options(const DataFlags& flags) {
    dbnn::IngestOptions options;
    if (flags.header == "yes") options.header = dbnn::HeaderMode::Present;
    if (flags.header == "no") options.header = dbnn::HeaderMode::Absent;
    options.class_column_first = flags.class_column == "first";
    options.classes = flags.classes;
    return options;
}

dbnn::BinningOptions binning_options(const ModelFlags& flags) {
    dbnn::BinningOptions options;
    options.bin_cap = flags.bin_cap;
    for (const std::string& spec : flags.bins) {
        const std::size_t eq = spec.find('=');
        if (eq == std::string::npos) {
            throw dbnn::Error("--bins entries must look like feature=count, got '" + spec + "'");
        }
        try {
            const std::size_t feature = std::stoul(spec.substr(0, eq));
            const std::size_t count = std::stoul(spec.substr(eq + 1));
            options.bin_overrides[feature] = count;
        } catch (const std::exception&) {
            throw dbnn::Error("--bins entries must look like feature=count, got '" + spec + "'");
        }
    }
    return options;
}

int cmd_train(const std::string& data_path, const DataFlags& data_flags, const ModelFlags& model_flags,
              const std::string& out_path) {
    const dbnn::Dataset d = dbnn::ingest_csv(data_path, ingest_options(data_flags));
    const dbnn::BinningSchema schema = dbnn::infer_schema(d, binning_options(model_flags));
    const dbnn::TrainedModel model = dbnn::train(d, schema, model_flags.alpha, model_flags.iterations);
    model.save(out_path);

    const dbnn::EvalReport report = dbnn::evaluate(model, d);
    std::cout << "trained on " << d.size() << " examples (" << d.feature_count() << " features, "
              << d.class_count() << " classes)\n"
              << "training accuracy: " << report.accuracy << "%\n"
              << "model written to " << out_path << "\n";
    return 0;
}

int cmd_select(const std::string& data_path, const DataFlags& data_flags, const ModelFlags& model_flags,
               std::uint64_t seed, std::size_t max_rounds, const std::string& out_dir) {
    const dbnn::Dataset d = dbnn::ingest_csv(data_path, ingest_options(data_flags));

    dbnn::SelectionConfig config;
    config.alpha = model_flags.alpha;
    config.iterations = model_flags.iterations;
    config.binning = binning_options(model_flags);
    config.seed = seed;
    config.max_rounds = max_rounds;

    const dbnn::SelectionReport report = dbnn::run_odsa(d, config);

    std::filesystem::create_directories(out_dir);
    const auto path = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };

    // train.csv carries the join round as an extra final column
    {
        std::ofstream out(path("train.csv"));
        if (!out) throw dbnn::Error("cannot open '" + path("train.csv") + "' for writing");
        const auto& schema = d.schema();
        for (std::size_t f = 0; f < schema.feature_count; ++f) {
            out << (schema.feature_names.empty() ? "f" + std::to_string(f) : schema.feature_names[f])
                << ',';
        }
        out << schema.class_column_name << ",round_added\n";
        for (std::size_t i = 0; i < report.train_indices.size(); ++i) {
            const dbnn::Example& e = d[report.train_indices[i]];
            std::ostringstream row;
            for (double v : e.features) {
                char buf[64];
                auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
                (void)ec;
                row << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << ',';
            }
            row << schema.class_names[static_cast<std::size_t>(e.label)] << ','
                << report.train_round_added[i];
            out << row.str() << '\n';
        }
    }
    dbnn::write_csv(dbnn::subset(d, report.test_indices), path("test.csv"));
    {
        std::ofstream out(path("curve.csv"));
        if (!out) throw dbnn::Error("cannot open '" + path("curve.csv") + "' for writing");
        out << dbnn::curve_to_csv(report.curve);
    }
    {
        std::ofstream out(path("report.json"));
        if (!out) throw dbnn::Error("cannot open '" + path("report.json") + "' for writing");
        out << dbnn::selection_report_to_json(report, config);
    }
    report.model.save(path("model.dbnn"));

    std::cout << (report.converged ? "converged" : "stopped at the round limit") << " after "
              << report.curve.size() << " round(s)\n"
              << "training pool: " << report.train_indices.size()
              << "  evaluation pool: " << report.test_indices.size() << "\n"
              << "final train accuracy: " << report.final_train_accuracy << "%\n"
              << "final test accuracy: " << report.final_test_accuracy << "%\n"
              << "overall accuracy: " << report.overall_accuracy << "%\n"
              << "outputs written to " << out_dir << "\n";
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path, const DataFlags& data_flags,
                 std::optional<double> cutoff, const std::string& report_path) {
    const dbnn::TrainedModel model = dbnn::TrainedModel::load(model_path);
    const dbnn::Dataset d = dbnn::ingest_csv(data_path, ingest_options(data_flags));
    const dbnn::EvalReport report = dbnn::evaluate(model, d);

    std::cout << "examples: " << d.size() << "\n"
              << "accuracy: " << report.accuracy << "%\n"
              << dbnn::matrix_to_text(report.matrix, report.class_names);

    if (cutoff) {
        const dbnn::FilteredEvalReport filtered = dbnn::filter_by_confidence(report, *cutoff);
        std::cout << "\nconfidence cutoff: " << *cutoff << "%\n"
                  << "retained fraction: " << filtered.retained_fraction << "\n"
                  << "filtered accuracy: " << filtered.report.accuracy << "%\n"
                  << dbnn::matrix_to_text(filtered.report.matrix, filtered.report.class_names);
    }
    if (!report_path.empty()) {
        dbnn::write_eval_report(report, report_path);
        std::cout << "report written to " << report_path << "\n";
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, const DataFlags& data_flags,
                const std::string& out_path) {
    const dbnn::TrainedModel model = dbnn::TrainedModel::load(model_path);
    const dbnn::Dataset d = dbnn::ingest_csv(data_path, ingest_options(data_flags));
    if (d.feature_count() != model.feature_count()) {
        throw dbnn::Error("data has " + std::to_string(d.feature_count()) +
                          " features, the model expects " + std::to_string(model.feature_count()));
    }

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw dbnn::Error("cannot open '" + out_path + "' for writing");
        out = &file;
    }
    *out << "row,predicted,confidence\n";
    for (const dbnn::Example& e : d.examples()) {
        const dbnn::Prediction p = model.predict(e.features);
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), p.confidence);
        (void)ec;
        *out << e.source_index << ',' << model.class_names()[static_cast<std::size_t>(p.predicted)]
             << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
    }
    if (!out_path.empty()) std::cout << d.size() << " predictions written to " << out_path << "\n";
    return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, double tv_threshold,
                std::size_t min_support, const std::string& out_path) {
    const dbnn::EvalReport a = dbnn::read_eval_report(path_a);
    const dbnn::EvalReport b = dbnn::read_eval_report(path_b);
    dbnn::CompareOptions options;
    options.tv_threshold = tv_threshold;
    options.min_support = min_support;
    const dbnn::DivergenceReport report = dbnn::compare_distributions(a, b, options);

    std::cout << dbnn::divergence_report_to_text(report);
    const auto flagged = report.flagged_classes();
    if (flagged.empty()) {
        std::cout << "no classes diverge beyond tv=" << tv_threshold << "\n";
    } else {
        std::cout << "diverging classes:";
        for (const std::string& name : flagged) std::cout << ' ' << name;
        std::cout << '\n';
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw dbnn::Error("cannot open '" + out_path + "' for writing");
        out << dbnn::divergence_report_to_json(report);
        std::cout << "report written to " << out_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Histogram-binned Bayesian classifier with boosted bin weights and"
                 " optimal training-data selection"};
    app.require_subcommand(1);

    DataFlags data_flags;
    ModelFlags model_flags;

    auto* train_cmd = app.add_subcommand("train", "Train a model on a CSV file");
    std::string train_data, train_out = "model.dbnn";
    train_cmd->add_option("data", train_data, "Training CSV")->required();
    train_cmd->add_option("-o,--out", train_out, "Model output path")->capture_default_str();
    add_data_flags(train_cmd, data_flags);
    add_model_flags(train_cmd, model_flags);

    auto* select_cmd = app.add_subcommand(
        "select", "Build a minimal training subset by iterative failure selection");
    std::string select_data, select_out;
    std::uint64_t seed = 0;
    std::size_t max_rounds = 0;
    select_cmd->add_option("data", select_data, "Source CSV")->required();
    select_cmd->add_option("-o,--out-dir", select_out, "Output directory")->required();
    select_cmd->add_option("--seed", seed, "Seed for the initial per-class draw")->capture_default_str();
    select_cmd->add_option("--max-rounds", max_rounds, "Round limit (0 = one round per example)")
        ->capture_default_str();
    add_data_flags(select_cmd, data_flags);
    add_model_flags(select_cmd, model_flags);

    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a model against a labeled CSV file");
    std::string eval_model, eval_data, eval_report;
    double cutoff_value = 0.0;
    eval_cmd->add_option("model", eval_model, "Model file")->required();
    eval_cmd->add_option("data", eval_data, "Labeled CSV")->required();
    auto* cutoff_opt = eval_cmd->add_option("--cutoff", cutoff_value,
                                            "Also report accuracy over predictions with confidence"
                                            " strictly above this percentage")
                           ->check(CLI::Range(0.0, 100.0));
    eval_cmd->add_option("--report", eval_report, "Write the full evaluation report as JSON");
    add_data_flags(eval_cmd, data_flags);

    auto* predict_cmd = app.add_subcommand("predict", "Per-row predictions with confidence");
    std::string predict_model, predict_data, predict_out;
    predict_cmd->add_option("model", predict_model, "Model file")->required();
    predict_cmd->add_option("data", predict_data, "Labeled CSV")->required();
    predict_cmd->add_option("-o,--out", predict_out, "Output CSV (default: stdout)");
    add_data_flags(predict_cmd, data_flags);

    auto* compare_cmd = app.add_subcommand(
        "compare", "Compare per-class prediction distributions of two evaluation reports");
    std::string compare_a, compare_b, compare_out;
    double tv_threshold = 0.2;
    std::size_t min_support = 5;
    compare_cmd->add_option("report_a", compare_a, "First evaluation report (JSON)")->required();
    compare_cmd->add_option("report_b", compare_b, "Second evaluation report (JSON)")->required();
    compare_cmd->add_option("--tv-threshold", tv_threshold, "Flag classes above this TV distance")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    compare_cmd->add_option("--min-support", min_support,
                            "Observed examples required before a class can be flagged")
        ->capture_default_str();
    compare_cmd->add_option("-o,--out", compare_out, "Write the divergence report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(train_cmd)) {
            return cmd_train(train_data, data_flags, model_flags, train_out);
        }
        if (app.got_subcommand(select_cmd)) {
            return cmd_select(select_data, data_flags, model_flags, seed, max_rounds, select_out);
        }
        if (app.got_subcommand(eval_cmd)) {
            std::optional<double> cutoff;
            if (cutoff_opt->count() > 0) cutoff = cutoff_value;
            return cmd_evaluate(eval_model, eval_data, data_flags, cutoff, eval_report);
        }
        if (app.got_subcommand(predict_cmd)) {
            return cmd_predict(predict_model, predict_data, data_flags, predict_out);
        }
        if (app.got_subcommand(compare_cmd)) {
            return cmd_compare(compare_a, compare_b, tv_threshold, min_support, compare_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
