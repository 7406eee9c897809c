#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dbnn/binning.hpp"
#include "dbnn/dataset.hpp"
#include "dbnn/eval.hpp"
#include "dbnn/model.hpp"
#include "dbnn/odsa.hpp"
#include "dbnn/report_io.hpp"

namespace py = pybind11;
using namespace dbnn;

namespace {

IngestOptions make_ingest_options(const std::string& header, bool class_column_first,
                                  const std::vector<std::string>& classes) {
    IngestOptions options;
    if (header == "yes") {
        options.header = HeaderMode::Present;
    } else if (header == "no") {
        options.header = HeaderMode::Absent;
    } else if (header != "auto") {
        throw Error("header must be one of 'auto', 'yes', 'no'");
    }
    options.class_column_first = class_column_first;
    options.classes = classes;
    return options;
}

BinningOptions make_binning_options(const std::map<std::size_t, std::size_t>& overrides,
                                    std::size_t bin_cap) {
    BinningOptions options;
    options.bin_overrides = overrides;
    options.bin_cap = bin_cap;
    return options;
}

std::vector<std::vector<std::int64_t>> matrix_rows(const ConfusionMatrix& m) {
    std::vector<std::vector<std::int64_t>> rows(m.class_count(),
                                                std::vector<std::int64_t>(m.class_count()));
    for (std::size_t p = 0; p < m.class_count(); ++p) {
        for (std::size_t t = 0; t < m.class_count(); ++t) rows[p][t] = m.cell(p, t);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Histogram-binned Bayesian classifier with boosted bin weights and"
              " optimal training-data selection";

    py::register_exception<Error>(m, "DbnnError");

    py::class_<Example>(m, "Example")
        .def_readonly("features", &Example::features)
        .def_readonly("label", &Example::label)
        .def_readonly("source_index", &Example::source_index)
        .def("__repr__", [](const Example& e) {
            return "Example(label=" + std::to_string(e.label) + ", row=" +
                   std::to_string(e.source_index) + ")";
        });

    py::class_<Dataset>(m, "Dataset")
        .def("__len__", &Dataset::size)
        .def("__getitem__",
             [](const Dataset& d, std::size_t i) {
                 if (i >= d.size()) throw py::index_error();
                 return d[i];
             })
        .def_property_readonly("feature_count", &Dataset::feature_count)
        .def_property_readonly("class_names",
                               [](const Dataset& d) { return d.schema().class_names; })
        .def_property_readonly("feature_names",
                               [](const Dataset& d) { return d.schema().feature_names; })
        .def("class_counts", &Dataset::class_counts);

    m.def(
        "ingest_csv",
        [](const std::string& path, const std::string& header, bool class_column_first,
           const std::vector<std::string>& classes) {
            return ingest_csv(path, make_ingest_options(header, class_column_first, classes));
        },
        py::arg("path"), py::arg("header") = "auto", py::arg("class_column_first") = false,
        py::arg("classes") = std::vector<std::string>{},
        "Read a labeled CSV file (F numeric features plus a class token per row).");

    m.def("write_csv", [](const Dataset& d, const std::string& path) { write_csv(d, path); },
          py::arg("dataset"), py::arg("path"));

    m.def("split_by_indices", &split_by_indices, py::arg("dataset"), py::arg("indices"));

    py::class_<FeatureBinning>(m, "FeatureBinning")
        .def_readonly("bin_count", &FeatureBinning::bin_count)
        .def_readonly("lo", &FeatureBinning::lo)
        .def_readonly("hi", &FeatureBinning::hi);

    py::class_<BinningSchema>(m, "BinningSchema")
        .def_property_readonly("feature_count", &BinningSchema::feature_count)
        .def("feature", &BinningSchema::feature, py::return_value_policy::copy)
        .def("bin",
             [](const BinningSchema& s, std::size_t feature, double value) {
                 return s.bin(feature, value);
             })
        .def("bin_all", [](const BinningSchema& s, const std::vector<double>& features) {
            return s.bin_all(features);
        });

    m.def(
        "infer_schema",
        [](const Dataset& d, const std::map<std::size_t, std::size_t>& bin_overrides,
           std::size_t bin_cap) { return infer_schema(d, make_binning_options(bin_overrides, bin_cap)); },
        py::arg("dataset"), py::arg("bin_overrides") = std::map<std::size_t, std::size_t>{},
        py::arg("bin_cap") = 32);

    py::class_<Prediction>(m, "Prediction")
        .def_readonly("predicted", &Prediction::predicted)
        .def_readonly("confidence", &Prediction::confidence)
        .def_readonly("posterior", &Prediction::posterior);

    py::class_<TrainedModel>(m, "TrainedModel")
        .def_property_readonly("class_names", &TrainedModel::class_names)
        .def_property_readonly("feature_count", &TrainedModel::feature_count)
        .def_property_readonly("format_version", &TrainedModel::format_version)
        .def("posterior",
             [](const TrainedModel& m_, const std::vector<double>& x) { return m_.posterior(x); })
        .def("predict",
             [](const TrainedModel& m_, const std::vector<double>& x) { return m_.predict(x); })
        .def("save", [](const TrainedModel& m_, const std::string& path) { m_.save(path); })
        .def_static("load", [](const std::string& path) { return TrainedModel::load(path); });

    m.def(
        "train",
        [](const Dataset& d, const BinningSchema* schema, double alpha, int iterations,
           const std::map<std::size_t, std::size_t>& bin_overrides, std::size_t bin_cap) {
            const BinningSchema inferred =
                schema ? *schema : infer_schema(d, make_binning_options(bin_overrides, bin_cap));
            return train(d, inferred, alpha, iterations);
        },
        py::arg("dataset"), py::arg("schema") = nullptr, py::arg("alpha") = 0.9,
        py::arg("iterations") = 10, py::arg("bin_overrides") = std::map<std::size_t, std::size_t>{},
        py::arg("bin_cap") = 32,
        "Train a model; the binning schema is inferred from the dataset when not given.");

    py::class_<CurvePoint>(m, "CurvePoint")
        .def_readonly("round", &CurvePoint::round)
        .def_readonly("pseudo_accuracy", &CurvePoint::pseudo_accuracy)
        .def_readonly("real_accuracy", &CurvePoint::real_accuracy)
        .def_readonly("train_size", &CurvePoint::train_size)
        .def_readonly("test_size", &CurvePoint::test_size);

    py::class_<SelectionReport>(m, "SelectionReport")
        .def_readonly("train_indices", &SelectionReport::train_indices)
        .def_readonly("train_round_added", &SelectionReport::train_round_added)
        .def_readonly("test_indices", &SelectionReport::test_indices)
        .def_readonly("curve", &SelectionReport::curve)
        .def_readonly("model", &SelectionReport::model)
        .def_readonly("overall_accuracy", &SelectionReport::overall_accuracy)
        .def_readonly("final_train_accuracy", &SelectionReport::final_train_accuracy)
        .def_readonly("final_test_accuracy", &SelectionReport::final_test_accuracy)
        .def_readonly("converged", &SelectionReport::converged);

    const auto make_config = [](double alpha, int iterations, std::uint64_t seed,
                                std::size_t max_rounds,
                                const std::map<std::size_t, std::size_t>& bin_overrides,
                                std::size_t bin_cap) {
        SelectionConfig config;
        config.alpha = alpha;
        config.iterations = iterations;
        config.seed = seed;
        config.max_rounds = max_rounds;
        config.binning = make_binning_options(bin_overrides, bin_cap);
        return config;
    };

    m.def(
        "run_odsa",
        [make_config](const Dataset& d, double alpha, int iterations, std::uint64_t seed,
                      std::size_t max_rounds, const std::map<std::size_t, std::size_t>& bin_overrides,
                      std::size_t bin_cap) {
            return run_odsa(d, make_config(alpha, iterations, seed, max_rounds, bin_overrides, bin_cap));
        },
        py::arg("dataset"), py::arg("alpha") = 0.9, py::arg("iterations") = 10, py::arg("seed") = 0,
        py::arg("max_rounds") = 0, py::arg("bin_overrides") = std::map<std::size_t, std::size_t>{},
        py::arg("bin_cap") = 32,
        "Iteratively migrate the worst per-class failures into the training pool"
        " until the rest is classified error-free.");

    m.def(
        "random_baseline",
        [make_config](const Dataset& d, std::size_t train_size, double alpha, int iterations,
                      std::uint64_t seed, const std::map<std::size_t, std::size_t>& bin_overrides,
                      std::size_t bin_cap) {
            return random_baseline(d, train_size,
                                   make_config(alpha, iterations, seed, 0, bin_overrides, bin_cap));
        },
        py::arg("dataset"), py::arg("train_size"), py::arg("alpha") = 0.9, py::arg("iterations") = 10,
        py::arg("seed") = 0, py::arg("bin_overrides") = std::map<std::size_t, std::size_t>{},
        py::arg("bin_cap") = 32);

    py::class_<PredictionRecord>(m, "PredictionRecord")
        .def_readonly("source_index", &PredictionRecord::source_index)
        .def_readonly("true_label", &PredictionRecord::true_label)
        .def_readonly("predicted", &PredictionRecord::predicted)
        .def_readonly("confidence", &PredictionRecord::confidence);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("accuracy", &EvalReport::accuracy)
        .def_readonly("predictions", &EvalReport::predictions)
        .def_readonly("class_names", &EvalReport::class_names)
        .def_property_readonly("matrix", [](const EvalReport& r) { return matrix_rows(r.matrix); })
        .def("to_json", &eval_report_to_json);

    py::class_<FilteredEvalReport>(m, "FilteredEvalReport")
        .def_readonly("report", &FilteredEvalReport::report)
        .def_readonly("cutoff", &FilteredEvalReport::cutoff)
        .def_readonly("retained_fraction", &FilteredEvalReport::retained_fraction);

    m.def("evaluate", &evaluate, py::arg("model"), py::arg("dataset"));
    m.def("filter_by_confidence", &filter_by_confidence, py::arg("report"), py::arg("cutoff"));

    py::enum_<ComparisonStatus>(m, "ComparisonStatus")
        .value("OK", ComparisonStatus::Ok)
        .value("FLAGGED", ComparisonStatus::Flagged)
        .value("INSUFFICIENT_SUPPORT", ComparisonStatus::InsufficientSupport);

    py::class_<ClassComparison>(m, "ClassComparison")
        .def_readonly("class_name", &ClassComparison::class_name)
        .def_readonly("support_synthetic", &ClassComparison::support_synthetic)
        .def_readonly("support_observed", &ClassComparison::support_observed)
        .def_readonly("tv_distance", &ClassComparison::tv_distance)
        .def_readonly("recall_synthetic", &ClassComparison::recall_synthetic)
        .def_readonly("recall_observed", &ClassComparison::recall_observed)
        .def_readonly("status", &ClassComparison::status);

    py::class_<DivergenceReport>(m, "DivergenceReport")
        .def_readonly("classes", &DivergenceReport::classes)
        .def_readonly("tv_threshold", &DivergenceReport::tv_threshold)
        .def_readonly("min_support", &DivergenceReport::min_support)
        .def("flagged_classes", &DivergenceReport::flagged_classes)
        .def("to_json", &divergence_report_to_json);

    m.def(
        "compare_distributions",
        [](const EvalReport& synthetic, const EvalReport& observed, double tv_threshold,
           std::size_t min_support) {
            CompareOptions options;
            options.tv_threshold = tv_threshold;
            options.min_support = min_support;
            return compare_distributions(synthetic, observed, options);
        },
        py::arg("synthetic"), py::arg("observed"), py::arg("tv_threshold") = 0.2,
        py::arg("min_support") = 5);

    m.def("read_eval_report", &read_eval_report, py::arg("path"));
}
