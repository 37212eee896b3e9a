// geocmd: generate -> split -> train -> predict -> evaluate -> report.
//
// Failures print {"error": <code>, "message": <text>} on stderr and exit 1.

#include "geocmd/command_model.hpp"
#include "geocmd/dataset.hpp"
#include "geocmd/forest.hpp"
#include "geocmd/harness.hpp"
#include "geocmd/llm_client.hpp"
#include "geocmd/model_io.hpp"
#include "geocmd/rule_translator.hpp"
#include "geocmd/svm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace geocmd;

namespace {

class CliError : public Error {
public:
    CliError(const std::string& code, const std::string& message) : Error(code, message) {}
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError("IoError", "cannot write " + path.string());
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError("IoError", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void fail(const std::string& code, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = code;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Natural-language to GIS function call translation and evaluation"};
    app.require_subcommand(1);

    // generate
    std::uint64_t gen_seed = 1;
    std::uint32_t per_function = kDefaultPerFunction;
    fs::path gen_out;
    auto* gen = app.add_subcommand("generate", "Generate the synthetic query corpus");
    gen->add_option("--seed", gen_seed, "Master seed");
    gen->add_option("--per-function", per_function, "Samples per function")->check(CLI::PositiveNumber);
    gen->add_option("--out", gen_out, "Dataset JSONL")->required();

    // split
    fs::path split_in, split_dir;
    SplitSpec split_spec;
    auto* spl = app.add_subcommand("split", "Split a dataset into train/val/test JSONL");
    spl->add_option("--in", split_in, "Dataset JSONL")->required();
    spl->add_option("--seed", split_spec.seed, "Shuffle seed");
    spl->add_option("--train-fraction", split_spec.train_fraction);
    spl->add_option("--out-dir", split_dir, "Directory for train/val/test.jsonl")->required();

    // train
    std::string model_kind;
    fs::path train_in, train_out;
    std::uint64_t train_seed = 1;
    SvmOptions svm_opts;
    ForestOptions rf_opts;
    std::string max_features = "sqrt";
    auto* trn = app.add_subcommand("train", "Train a function classifier");
    trn->add_option("--model", model_kind, "svm or rf")->required()->check(CLI::IsMember({"svm", "rf"}));
    trn->add_option("--in", train_in, "Training JSONL")->required();
    trn->add_option("--seed", train_seed, "Training seed");
    trn->add_option("--out", train_out, "Model file")->required();
    trn->add_option("--C", svm_opts.C, "SVM regularization")->check(CLI::PositiveNumber);
    trn->add_option("--tol", svm_opts.tol, "SVM relative objective tolerance");
    trn->add_option("--max-iter", svm_opts.max_iter, "SVM epoch cap");
    trn->add_option("--trees", rf_opts.n_trees, "Forest size")->check(CLI::PositiveNumber);
    trn->add_option("--max-features", max_features, "sqrt or all")->check(CLI::IsMember({"sqrt", "all"}));
    trn->add_option("--min-samples-split", rf_opts.min_samples_split);
    trn->add_option("--min-samples-leaf", rf_opts.min_samples_leaf);
    trn->add_option("--threads", rf_opts.n_threads, "Forest training threads")->check(CLI::PositiveNumber);

    // predict
    std::string system, system_name;
    fs::path pred_model, pred_rules, pred_in, pred_out;
    LlmConfig llm;
    llm.endpoint_url = "https://api.cohere.com/v2/chat";
    auto* prd = app.add_subcommand("predict", "Run one system over a dataset split");
    prd->add_option("--system", system, "svm, rf, rules or llm")
        ->required()
        ->check(CLI::IsMember({"svm", "rf", "rules", "llm"}));
    prd->add_option("--name", system_name, "System name written to the records (default: --system)");
    prd->add_option("--model", pred_model, "Model file (svm, rf)");
    prd->add_option("--rules", pred_rules, "Rules file (rules; default: built-in)");
    prd->add_option("--endpoint", llm.endpoint_url, "Chat endpoint URL (llm)");
    prd->add_option("--llm-model", llm.model_name, "Remote model name (llm)");
    prd->add_option("--max-tokens", llm.max_tokens);
    prd->add_option("--temperature", llm.temperature);
    prd->add_option("--retries", llm.max_retries);
    prd->add_option("--in", pred_in, "Dataset JSONL")->required();
    prd->add_option("--out", pred_out, "Predictions JSONL (llm runs resume from it)")->required();

    // evaluate
    std::vector<fs::path> eval_preds;
    fs::path eval_out;
    auto* evl = app.add_subcommand("evaluate", "Score predictions files into a CSV report");
    evl->add_option("--preds", eval_preds, "Predictions JSONL files")->required();
    evl->add_option("--out", eval_out, "Report CSV (default: stdout)");

    // report
    fs::path rep_in, rep_out;
    std::string rep_format = "md";
    auto* rep = app.add_subcommand("report", "Render a CSV report");
    rep->add_option("--in", rep_in, "Report CSV")->required();
    rep->add_option("--format", rep_format, "md or csv")->check(CLI::IsMember({"md", "markdown", "csv"}));
    rep->add_option("--out", rep_out, "Output file (default: stdout)");

    // translate
    std::string query;
    fs::path tr_rules, tr_model;
    auto* trs = app.add_subcommand("translate", "Translate one query with the rules, or classify it with a model");
    trs->add_option("query", query, "Natural-language query")->required();
    trs->add_option("--rules", tr_rules, "Rules file (default: built-in)");
    trs->add_option("--model", tr_model, "Classify with this model file instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            save_jsonl(generate(gen_seed, per_function), gen_out);
        } else if (*spl) {
            const auto parts = split(load_jsonl(split_in), split_spec);
            fs::create_directories(split_dir);
            save_jsonl(parts.train, split_dir / "train.jsonl");
            save_jsonl(parts.val, split_dir / "val.jsonl");
            save_jsonl(parts.test, split_dir / "test.jsonl");
        } else if (*trn) {
            const auto train = load_jsonl(train_in);
            if (model_kind == "svm") {
                svm_opts.seed = train_seed;
                save_model(train_svm(train, svm_opts), train_out);
            } else {
                rf_opts.seed = train_seed;
                rf_opts.max_features = max_features == "all" ? FeatureRule::All : FeatureRule::Sqrt;
                save_model(train_forest(train, rf_opts), train_out);
            }
        } else if (*prd) {
            const auto samples = load_jsonl(pred_in);
            const std::string name = system_name.empty() ? system : system_name;
            std::vector<PredictionRecord> records;
            if (system == "svm" || system == "rf") {
                if (pred_model.empty()) throw CliError("MissingOption", "--model is required for --system " + system);
                records = predict_classifier(load_model(pred_model), samples, name);
            } else if (system == "rules") {
                records = pred_rules.empty() ? predict_rules(RuleSet::builtin(), samples, name)
                                             : predict_rules(RuleSet::load(pred_rules), samples, name);
            } else {
                const LlmConfig env = LlmConfig::from_environment(llm.endpoint_url, llm.model_name);
                llm.api_key = env.api_key;
                LlmClient client(llm, std::make_shared<HttpTransport>());
                records = batch_translate(client, samples, BatchOptions{name, pred_out});
            }
            save_predictions(records, pred_out);
        } else if (*evl) {
            std::vector<PredictionRecord> records;
            for (const auto& p : eval_preds) {
                auto part = load_predictions(p);
                records.insert(records.end(), std::make_move_iterator(part.begin()),
                               std::make_move_iterator(part.end()));
            }
            const std::string csv = report_csv(evaluate(records));
            if (eval_out.empty()) std::cout << csv;
            else write_text(eval_out, csv);
        } else if (*rep) {
            const auto reports = parse_report_csv(read_text(rep_in));
            const std::string text = render_report(reports, *parse_report_format(rep_format));
            if (rep_out.empty()) std::cout << text;
            else write_text(rep_out, text);
        } else if (*trs) {
            nlohmann::ordered_json j;
            j["query"] = query;
            if (!tr_model.empty()) {
                j["label"] = predict_label(load_model(tr_model), query);
            } else {
                const RuleSet rules = tr_rules.empty() ? RuleSet::builtin() : RuleSet::load(tr_rules);
                if (auto m = rules.match(query)) {
                    j["call"] = serialize_call(m->call);
                    j["rule"] = m->rule_id;
                } else {
                    j["call"] = nullptr;
                }
            }
            std::cout << j.dump() << '\n';
        }
    } catch (const Error& e) {
        fail(e.code(), e.what());
        return 1;
    } catch (const fs::filesystem_error& e) {
        fail("IoError", e.what());
        return 1;
    } catch (const std::exception& e) {
        fail("InternalError", e.what());
        return 1;
    }
    return 0;
}
