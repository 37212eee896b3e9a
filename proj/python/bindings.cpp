// Python module geocmd._core: thin wrappers over the C++ core.

#include "geocmd/command_model.hpp"
#include "geocmd/dataset.hpp"
#include "geocmd/forest.hpp"
#include "geocmd/harness.hpp"
#include "geocmd/llm_client.hpp"
#include "geocmd/metrics.hpp"
#include "geocmd/model_io.hpp"
#include "geocmd/rule_translator.hpp"
#include "geocmd/svm.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace geocmd;

namespace {

py::dict report_dict(const MetricReport& r) {
    py::dict d;
    d["system"] = r.system;
    d["kind"] = std::string(to_string(r.kind));
    d["n"] = r.n;
    d["ema"] = r.ema;
    d["ls"] = r.ls;
    d["rouge1"] = r.rouge1;
    d["rougeL"] = r.rougeL;
    d["precision"] = r.precision;
    d["recall"] = r.recall;
    d["f1"] = r.f1;
    d["accuracy"] = r.accuracy;
    return d;
}

class Model {
public:
    explicit Model(AnyModel m) : model_(std::move(m)) {}
    std::string kind() const { return std::holds_alternative<SvmModel>(model_) ? "svm" : "rf"; }
    std::string predict(const std::string& query) const { return predict_label(model_, query); }
    std::vector<std::string> classes() const {
        return std::visit([](const auto& m) { return m.classes; }, model_);
    }
    std::string to_text() const {
        return std::visit([](const auto& m) { return to_model_text(m); }, model_);
    }
    void save(const std::filesystem::path& path) const {
        std::visit([&](const auto& m) { save_model(m, path); }, model_);
    }
    const AnyModel& any() const { return model_; }

private:
    AnyModel model_;
};

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Natural-language to GIS function call translation core";

    // Raised for every library error; .code carries the machine-readable kind.
    static const py::handle error_type = py::exception<Error>(m, "GeocmdError", PyExc_RuntimeError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object instance = py::reinterpret_borrow<py::object>(error_type)(e.what());
            instance.attr("code") = e.code();
            PyErr_SetObject(error_type.ptr(), instance.ptr());
        }
    });

    m.attr("FUNCTION_NAMES") = std::vector<std::string>(kFunctionNames.begin(), kFunctionNames.end());

    m.def("canonicalize", [](const std::string& text) { return serialize_call(parse_call(text)); },
          py::arg("call"), "Parse a call string and return its canonical form");
    m.def("call_function", [](const std::string& text) { return std::string(function_name(parse_call(text))); },
          py::arg("call"));
    m.def("is_valid_call", [](const std::string& text) { return try_parse_call(text).has_value(); }, py::arg("call"));

    py::class_<Sample>(m, "Sample")
        .def(py::init<>())
        .def(py::init([](std::uint64_t id, std::string function, std::string query, std::string call) {
                 return Sample{id, std::move(function), std::move(query), std::move(call)};
             }),
             py::arg("id"), py::arg("function"), py::arg("query"), py::arg("call"))
        .def_readwrite("id", &Sample::id)
        .def_readwrite("function", &Sample::function)
        .def_readwrite("query", &Sample::query)
        .def_readwrite("call", &Sample::call)
        .def("__eq__", [](const Sample& a, const Sample& b) { return a == b; })
        .def("__repr__", [](const Sample& s) { return "Sample(" + std::to_string(s.id) + ", " + s.call + ")"; });

    m.def("generate", &generate, py::arg("seed") = 1, py::arg("per_function") = kDefaultPerFunction);
    m.def(
        "split",
        [](const std::vector<Sample>& samples, std::uint64_t seed, double train_fraction) {
            const auto parts = split(samples, SplitSpec{seed, train_fraction, 0.5});
            return py::make_tuple(parts.train, parts.val, parts.test);
        },
        py::arg("samples"), py::arg("seed") = 1, py::arg("train_fraction") = 0.8);
    m.def("load_dataset", &load_jsonl, py::arg("path"));
    m.def("save_dataset", &save_jsonl, py::arg("samples"), py::arg("path"));

    py::class_<Model>(m, "Model")
        .def_property_readonly("kind", &Model::kind)
        .def_property_readonly("classes", &Model::classes)
        .def("predict", &Model::predict, py::arg("query"))
        .def("to_text", &Model::to_text)
        .def("save", &Model::save, py::arg("path"));
    m.def(
        "train_svm",
        [](const std::vector<Sample>& train, double C, double tol, std::uint32_t max_iter) {
            SvmOptions o;
            o.C = C;
            o.tol = tol;
            o.max_iter = max_iter;
            py::gil_scoped_release release;
            return Model(train_svm(train, o));
        },
        py::arg("train"), py::arg("C") = 1.0, py::arg("tol") = 1e-4, py::arg("max_iter") = 1000);
    m.def(
        "train_forest",
        [](const std::vector<Sample>& train, std::uint32_t n_trees, std::uint64_t seed, std::uint32_t n_threads) {
            ForestOptions o;
            o.n_trees = n_trees;
            o.seed = seed;
            o.n_threads = n_threads;
            py::gil_scoped_release release;
            return Model(train_forest(train, o));
        },
        py::arg("train"), py::arg("n_trees") = 100, py::arg("seed") = 1, py::arg("n_threads") = 1);
    m.def("load_model", [](const std::filesystem::path& path) { return Model(load_model(path)); }, py::arg("path"));
    m.def("model_from_text", [](const std::string& text) { return Model(model_from_text(text)); }, py::arg("text"));

    m.def(
        "translate_rules",
        [](const std::string& query, std::optional<std::filesystem::path> rules) -> std::optional<std::string> {
            const auto call = rules ? RuleSet::load(*rules).translate(query) : translate_rules(query);
            if (!call) return std::nullopt;
            return serialize_call(*call);
        },
        py::arg("query"), py::arg("rules") = std::nullopt, "Canonical call string, or None for no match");
    m.def("default_rules_text", [] { return std::string(RuleSet::builtin_text()); });

    m.def("exact_match_accuracy", &exact_match_accuracy, py::arg("pairs"));
    m.def("levenshtein_distance", &levenshtein_distance, py::arg("a"), py::arg("b"));
    m.def("levenshtein_similarity", &levenshtein_similarity, py::arg("a"), py::arg("b"));
    m.def("rouge1", &rouge1, py::arg("reference"), py::arg("candidate"));
    m.def("rougeL", &rougeL, py::arg("reference"), py::arg("candidate"));

    m.def("build_prompt", &build_prompt, py::arg("query"));
    m.def("extract_call", &extract_call, py::arg("raw_text"));

    m.def(
        "evaluate",
        [](const std::vector<std::filesystem::path>& prediction_files) {
            std::vector<PredictionRecord> records;
            for (const auto& p : prediction_files) {
                auto part = load_predictions(p);
                records.insert(records.end(), part.begin(), part.end());
            }
            py::list out;
            for (const auto& r : evaluate(records)) out.append(report_dict(r));
            return out;
        },
        py::arg("prediction_files"), "Metric rows for predictions JSONL files");
    m.def(
        "report",
        [](const std::vector<std::filesystem::path>& prediction_files, const std::string& format) {
            std::vector<PredictionRecord> records;
            for (const auto& p : prediction_files) {
                auto part = load_predictions(p);
                records.insert(records.end(), part.begin(), part.end());
            }
            const auto fmt = parse_report_format(format);
            if (!fmt) throw py::value_error("format must be 'csv' or 'md'");
            return render_report(evaluate(records), *fmt);
        },
        py::arg("prediction_files"), py::arg("format") = "md");
    m.def(
        "predict_rules",
        [](const std::vector<Sample>& samples, const std::filesystem::path& out) {
            save_predictions(predict_rules(RuleSet::builtin(), samples), out);
        },
        py::arg("samples"), py::arg("out"));
    m.def(
        "predict_classifier",
        [](const Model& model, const std::vector<Sample>& samples, const std::string& system,
           const std::filesystem::path& out) { save_predictions(predict_classifier(model.any(), samples, system), out); },
        py::arg("model"), py::arg("samples"), py::arg("system"), py::arg("out"));
}
