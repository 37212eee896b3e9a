// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include "geocmd/command_model.hpp"
#include "geocmd/dataset.hpp"
#include "geocmd/harness.hpp"
#include "geocmd/llm_client.hpp"
#include "geocmd/metrics.hpp"
#include "geocmd/rule_translator.hpp"
#include "geocmd/svm.hpp"

#include "support/mock_transport.hpp"
#include "support/random_calls.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace geocmd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------- grammar

Outcome grammar_round_trip() {
    constexpr int kCalls = 20000;
    Rng rng(20240601);
    const auto t0 = Clock::now();
    int failures = 0;
    for (int i = 0; i < kCalls; ++i) {
        const GisCall c = testing::random_call(rng);
        const auto back = try_parse_call(serialize_call(c));
        if (!back || !(*back == c)) ++failures;
    }
    const double secs = seconds_since(t0);
    return {failures == 0 && secs < 10.0,
            std::to_string(kCalls) + " calls, " + std::to_string(failures) + " failures, " + fmt(secs) + " s"};
}

// ---------------------------------------------------------------- metrics

std::size_t brute_distance(std::string_view a, std::string_view b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    const std::size_t sub = brute_distance(a.substr(1), b.substr(1)) + (a[0] == b[0] ? 0 : 1);
    return std::min({sub, brute_distance(a.substr(1), b) + 1, brute_distance(a, b.substr(1)) + 1});
}

bool is_subsequence(const std::vector<std::string>& sub, const std::vector<std::string>& seq) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < seq.size() && j < sub.size(); ++i)
        if (seq[i] == sub[j]) ++j;
    return j == sub.size();
}

// Longest common subsequence by enumerating every subsequence of a.
std::size_t brute_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
        const auto bits = static_cast<std::size_t>(__builtin_popcount(mask));
        if (bits <= best) continue;
        std::vector<std::string> sub;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (mask & (1u << i)) sub.push_back(a[i]);
        if (is_subsequence(sub, b)) best = bits;
    }
    return best;
}

Outcome metric_oracles() {
    static constexpr std::string_view kAlphabet = "abcde";
    std::size_t pairs = 0, mismatches = 0;

    // Exhaustive over lengths <= 3.
    std::vector<std::string> shorts = {""};
    for (std::size_t k = 0; k < shorts.size(); ++k)
        if (shorts[k].size() < 3)
            for (char c : kAlphabet) shorts.push_back(shorts[k] + c);
    for (const auto& a : shorts)
        for (const auto& b : shorts) {
            ++pairs;
            mismatches += levenshtein_distance(a, b) != brute_distance(a, b);
        }

    // Random pairs up to length 8.
    Rng rng(99);
    const auto word = [&](std::size_t max_len) {
        std::string s(rng.below(max_len + 1), 'a');
        for (char& c : s) c = kAlphabet[rng.below(kAlphabet.size())];
        return s;
    };
    for (int i = 0; i < 6000; ++i) {
        const auto a = word(8), b = word(8);
        ++pairs;
        mismatches += levenshtein_distance(a, b) != brute_distance(a, b);
    }

    static const std::vector<std::string> kTokens = {"(", ")", "'", "x", "1"};
    std::size_t lcs_pairs = 0, lcs_mismatches = 0;
    for (int i = 0; i < 3000; ++i) {
        std::vector<std::string> a(rng.below(11)), b(rng.below(11));
        for (auto& t : a) t = kTokens[rng.below(kTokens.size())];
        for (auto& t : b) t = kTokens[rng.below(kTokens.size())];
        ++lcs_pairs;
        lcs_mismatches += lcs_length(a, b) != brute_lcs(a, b);
    }

    const bool kitten = levenshtein_similarity("kitten", "sitting") == 1.0 - 3.0 / 7.0;
    return {mismatches == 0 && pairs >= 5000 && lcs_mismatches == 0 && kitten,
            "levenshtein " + std::to_string(mismatches) + "/" + std::to_string(pairs) + " mismatches, lcs " +
                std::to_string(lcs_mismatches) + "/" + std::to_string(lcs_pairs) +
                " mismatches, LS(kitten,sitting) exact=" + (kitten ? "yes" : "no")};
}

// ---------------------------------------------------------------- corpus

const DatasetSplit& corpus_split() {
    static const DatasetSplit s = split(generate(1, 200), SplitSpec{});
    return s;
}

std::vector<Sample> held_out() {
    auto h = corpus_split().val;
    h.insert(h.end(), corpus_split().test.begin(), corpus_split().test.end());
    return h;
}

struct Trained {
    AnyModel svm;
    AnyModel rf;
    double svm_secs = 0.0;
    double rf_secs = 0.0;
};

const Trained& trained() {
    static const Trained t = [] {
        Trained r;
        auto t0 = Clock::now();
        r.svm = train_svm(corpus_split().train);
        r.svm_secs = seconds_since(t0);
        t0 = Clock::now();
        r.rf = train_forest(corpus_split().train);
        r.rf_secs = seconds_since(t0);
        return r;
    }();
    return t;
}

Outcome classifier_benchmark(const AnyModel& model, double secs, double floor, const std::string& name) {
    bool ok = secs < 120.0;
    std::string detail = "train " + fmt(secs) + " s";
    for (const auto& [label, samples] :
         std::vector<std::pair<std::string, std::vector<Sample>>>{{"test", corpus_split().test}, {"held-out", held_out()}}) {
        const auto r = evaluate(predict_classifier(model, samples, name)).at(0);
        ok = ok && *r.precision >= floor && *r.recall >= floor && *r.f1 >= floor;
        detail += "; " + label + " n=" + std::to_string(r.n) + " P=" + fmt(*r.precision) + " R=" + fmt(*r.recall) +
                  " F1=" + fmt(*r.f1);
    }
    return {ok, detail + " (floor " + fmt(floor) + ")"};
}

// ---------------------------------------------------------------- svm numerics

Outcome svm_numerics() {
    SvmTrainingTrace trace;
    train_svm(corpus_split().train, SvmOptions{}, &trace);
    std::size_t epochs = 0, increases = 0;
    for (const auto& h : trace.objective_history)
        for (std::size_t i = 1; i < h.size(); ++i) {
            ++epochs;
            increases += h[i] > h[i - 1] + 1e-9;
        }

    Rng rng(10);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::uint32_t dim = 8;
        std::vector<FeatureVector> x(10);
        std::vector<int> y(10);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i].dimension = dim;
            for (std::uint32_t k = 0; k < dim; ++k) {
                const double v = static_cast<double>(rng.between(-1000, 1000)) / 1000.0;
                if (v != 0.0) x[i].entries.push_back({k, v});
            }
            y[i] = rng.below(2) == 0 ? -1 : 1;
        }
        const SquaredHingeObjective f(x, y, dim, 1.0);
        std::vector<double> theta(dim + 1);
        for (auto& t : theta) t = static_cast<double>(rng.between(-1000, 1000)) / 1000.0;
        const auto g = f.gradient(theta);
        double diff = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            auto plus = theta, minus = theta;
            plus[k] += 1e-6;
            minus[k] -= 1e-6;
            const double fd = (f.value(plus) - f.value(minus)) / 2e-6;
            diff += (fd - g[k]) * (fd - g[k]);
            scale += g[k] * g[k];
        }
        worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(scale), 1e-12));
    }
    char rel[32];
    std::snprintf(rel, sizeof rel, "%.2e", worst);
    return {increases == 0 && epochs > 0 && worst < 1e-4,
            std::to_string(increases) + " increases over " + std::to_string(epochs) +
                " epochs, worst gradient rel err " + rel};
}

// ---------------------------------------------------------------- determinism

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
#ifdef GEOCMD_CLI_PATH
    const std::string cli = GEOCMD_CLI_PATH;
    const auto run_pipeline = [&](const fs::path& dir) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        const std::string d = dir.string();
        const std::vector<std::string> steps = {
            "generate --seed 1 --per-function 200 --out " + d + "/all.jsonl",
            "split --in " + d + "/all.jsonl --seed 1 --out-dir " + d,
            "train --model svm --seed 1 --in " + d + "/train.jsonl --out " + d + "/svm.json",
            "train --model rf --seed 1 --threads 2 --in " + d + "/train.jsonl --out " + d + "/rf.json",
            "predict --system rules --in " + d + "/test.jsonl --out " + d + "/rules.preds.jsonl",
            "predict --system svm --model " + d + "/svm.json --in " + d + "/test.jsonl --out " + d + "/svm.preds.jsonl",
            "predict --system rf --model " + d + "/rf.json --in " + d + "/test.jsonl --out " + d + "/rf.preds.jsonl",
            "evaluate --preds " + d + "/rules.preds.jsonl " + d + "/svm.preds.jsonl " + d + "/rf.preds.jsonl --out " + d +
                "/report.csv",
            "report --in " + d + "/report.csv --format md --out " + d + "/report.md",
        };
        for (const auto& s : steps)
            if (std::system((cli + " " + s + " > /dev/null").c_str()) != 0) return false;
        return true;
    };
    const fs::path root = fs::temp_directory_path() / "geocmd_acceptance_determinism";
    if (!run_pipeline(root / "a") || !run_pipeline(root / "b")) return {false, "pipeline command failed"};
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        ++files;
        differing += read_file(entry.path()) != read_file(root / "b" / entry.path().filename());
    }
    fs::remove_all(root);
    return {files == 11 && differing == 0,
            std::to_string(files) + " artifacts compared, " + std::to_string(differing) + " differ"};
#else
    return {false, "built without the CLI"};
#endif
}

// ---------------------------------------------------------------- rules

Outcome rules_coverage() {
    const auto test = evaluate(predict_rules(RuleSet::builtin(), corpus_split().test)).at(0);
    const auto all = evaluate(predict_rules(RuleSet::builtin(), generate(1, 200))).at(0);
    return {*test.ema == 1.0 && *all.ema == 1.0,
            "test EMA " + fmt(*test.ema) + " (n=" + std::to_string(test.n) + "), full corpus EMA " + fmt(*all.ema)};
}

// ---------------------------------------------------------------- llm

// Swaps one subword token in the arguments, the way a model slip would:
// alphanumeric runs are cut into pieces of at most four characters and one
// piece has every character shifted (digit +1, letter +1).
std::string corrupt_one_token(const std::string& call, Rng& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> pieces;
    for (std::size_t i = call.find('(') + 1; i < call.size();) {
        if (!std::isalnum(static_cast<unsigned char>(call[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < call.size() && j - i < 4 && std::isalnum(static_cast<unsigned char>(call[j]))) ++j;
        pieces.emplace_back(i, j - i);
        i = j;
    }
    const auto [pos, len] = pieces[rng.below(pieces.size())];
    std::string out = call;
    for (std::size_t k = pos; k < pos + len; ++k) {
        char& c = out[k];
        if (std::isdigit(static_cast<unsigned char>(c))) c = c == '9' ? '0' : c + 1;
        else if (c == 'z') c = 'a';
        else if (c == 'Z') c = 'A';
        else ++c;
    }
    return out;
}

MetricReport llm_run(const std::function<std::string(const std::string&)>& answer, const std::string& name) {
    const auto& samples = corpus_split().test;
    std::map<std::string, std::string> call_of;
    for (const auto& s : samples) call_of[s.query] = s.call;
    auto transport = std::make_shared<testing::MockTransport>(
        [&](const std::string& query) { return HttpResponse{200, testing::chat_response(answer(call_of.at(query)))}; });
    LlmConfig config;
    config.endpoint_url = "http://mock.invalid/v1/chat/completions";
    config.api_key = "test-key";
    LlmClient client(config, transport, [](std::chrono::milliseconds) {});
    BatchOptions options;
    options.system = name;
    return evaluate(batch_translate(client, samples, options)).at(0);
}

Outcome llm_mock() {
    const auto echo = llm_run([](const std::string& call) { return call; }, "llm-echo");
    Rng rng(7);
    const auto bad = llm_run([&](const std::string& call) { return corrupt_one_token(call, rng); }, "llm-corrupt");
    const bool ok = *echo.ema == 1.0 && *echo.ls == 1.0 && *echo.rouge1 == 1.0 && *echo.rougeL == 1.0 &&
                    *bad.ema < 1.0 && *bad.ls > 0.8;
    return {ok, "echo EMA/LS/R1/RL " + fmt(*echo.ema) + "/" + fmt(*echo.ls) + "/" + fmt(*echo.rouge1) + "/" +
                    fmt(*echo.rougeL) + "; corrupt EMA " + fmt(*bad.ema) + " LS " + fmt(*bad.ls)};
}

// ---------------------------------------------------------------- report

Outcome report_fidelity() {
    const auto& test = corpus_split().test;
    auto records = predict_rules(RuleSet::builtin(), test);
    for (auto r : predict_classifier(trained().svm, test, "svm")) records.push_back(std::move(r));
    for (auto r : predict_classifier(trained().rf, test, "rf")) records.push_back(std::move(r));
    const auto reports = evaluate(records);

    const std::string md = report_markdown(reports);
    const std::string csv = report_csv(reports);
    const bool stable = md == report_markdown(evaluate(records)) && csv == report_csv(evaluate(records)) &&
                        report_markdown(parse_report_csv(csv)) == md;

    std::vector<std::string> lines;
    std::istringstream in(md);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    const bool header =
        !lines.empty() &&
        lines[0] == "| System | Type | N | EMA | LS | ROUGE-1 | ROUGE-L | Precision | Recall | F1 Score | Accuracy |";
    const auto row_has = [&](const std::string& prefix, const std::string& cells) {
        for (const auto& l : lines)
            if (l.rfind(prefix, 0) == 0) return l.find(cells) != std::string::npos;
        return false;
    };
    const bool gen_dashes = row_has("| rules | Generation |", "| - | - | - | - |");
    const bool cls_dashes = row_has("| svm | Classification |", "| - | - | - | - |") &&
                            row_has("| rf | Classification |", "| - | - | - | - |");
    return {stable && header && gen_dashes && cls_dashes && reports.size() == 3,
            std::string("header ") + (header ? "ok" : "bad") + ", dash cells " +
                (gen_dashes && cls_dashes ? "ok" : "bad") + ", byte-stable " + (stable ? "yes" : "no")};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"grammar round-trip", grammar_round_trip},
        {"metric oracles", metric_oracles},
        {"svm benchmark",
         [] { return classifier_benchmark(trained().svm, trained().svm_secs, 0.95, "svm"); }},
        {"random forest benchmark",
         [] { return classifier_benchmark(trained().rf, trained().rf_secs, 0.93, "rf"); }},
        {"svm trainer numerics", svm_numerics},
        {"pipeline determinism", determinism},
        {"rules coverage", rules_coverage},
        {"llm path with mock transport", llm_mock},
        {"report fidelity", report_fidelity},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
        failed += !o.ok;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
