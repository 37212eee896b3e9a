#include "geocmd/harness.hpp"
#include "geocmd/metrics.hpp"
#include "geocmd/rng.hpp"

#include <doctest.h>

#include <filesystem>

using namespace geocmd;

namespace {

PredictionRecord gen(std::uint64_t id, const std::string& system, const std::string& ref, const std::string& pred) {
    PredictionRecord r;
    r.id = id;
    r.system = system;
    r.kind = PredictionKind::Generation;
    r.query = "q" + std::to_string(id);
    r.reference = ref;
    r.prediction = pred;
    return r;
}

PredictionRecord cls(std::uint64_t id, const std::string& system, const std::string& ref, const std::string& pred) {
    PredictionRecord r = gen(id, system, ref, pred);
    r.kind = PredictionKind::Classification;
    return r;
}

HarnessErrorKind harness_error_of(const std::vector<PredictionRecord>& records) {
    try {
        evaluate(records);
    } catch (const HarnessError& e) {
        return e.kind();
    }
    FAIL("expected HarnessError");
    return HarnessErrorKind::MalformedReport;
}

} // namespace

TEST_CASE("echo system scores 1.0 everywhere") {
    std::vector<PredictionRecord> records;
    for (const Sample& s : generate(4, 5)) records.push_back(gen(s.id, "echo", s.call, s.call));
    const auto reports = evaluate(records);
    REQUIRE(reports.size() == 1);
    const auto& r = reports[0];
    CHECK(r.n == 50);
    CHECK(*r.ema == 1.0);
    CHECK(*r.ls == 1.0);
    CHECK(*r.rouge1 == 1.0);
    CHECK(*r.rougeL == 1.0);
    CHECK_FALSE(r.precision.has_value());
    CHECK_FALSE(r.accuracy.has_value());
}

TEST_CASE("one garbled prediction in ten") {
    std::vector<PredictionRecord> records;
    for (int i = 0; i < 10; ++i) records.push_back(gen(i, "s", "ZoomIn(" + std::to_string(i + 1) + ")", ""));
    for (auto& r : records) r.prediction = r.reference;
    records[3].prediction = "ZoomOut(4)";
    const auto r = evaluate(records).at(0);
    CHECK(*r.ema == doctest::Approx(0.9));
    const double ls = (9.0 + levenshtein_similarity("ZoomIn(4)", "ZoomOut(4)")) / 10.0;
    CHECK(*r.ls == doctest::Approx(ls));
    CHECK(*r.rouge1 == doctest::Approx((9.0 + 0.75) / 10.0));
}

TEST_CASE("perfect classifier") {
    std::vector<PredictionRecord> records;
    std::uint64_t id = 0;
    for (const auto name : kFunctionNames)
        for (int k = 0; k < 3; ++k) records.push_back(cls(id++, "svm", std::string(name), std::string(name)));
    const auto r = evaluate(records).at(0);
    CHECK(r.kind == PredictionKind::Classification);
    CHECK(*r.precision == 1.0);
    CHECK(*r.recall == 1.0);
    CHECK(*r.f1 == 1.0);
    CHECK(*r.accuracy == 1.0);
    CHECK_FALSE(r.ema.has_value());
}

TEST_CASE("classification routing matches the metrics module") {
    std::vector<PredictionRecord> records;
    std::vector<StringPair> pairs;
    Rng rng(3);
    for (std::uint64_t i = 0; i < 120; ++i) {
        const std::string t(kFunctionNames[rng.below(10)]), p(kFunctionNames[rng.below(10)]);
        records.push_back(cls(i, "rf", t, p));
        pairs.emplace_back(t, p);
    }
    std::vector<std::string> classes(kFunctionNames.begin(), kFunctionNames.end());
    const auto expected = classification_report(pairs, classes);
    const auto r = evaluate(records).at(0);
    CHECK(*r.precision == expected.macro_precision);
    CHECK(*r.recall == expected.macro_recall);
    CHECK(*r.f1 == expected.macro_f1);
    CHECK(*r.accuracy == expected.accuracy);
}

TEST_CASE("evaluation errors") {
    CHECK(harness_error_of({gen(0, "x", "ZoomIn(1)", "ZoomIn(1)"), cls(1, "x", "ZoomIn", "ZoomIn")}) ==
          HarnessErrorKind::MixedKinds);
    CHECK(harness_error_of({gen(0, "", "ZoomIn(1)", "ZoomIn(1)")}) == HarnessErrorKind::EmptySystem);
    CHECK(harness_error_of({gen(0, "x", "ZoomIn(1)", "a"), gen(0, "x", "ZoomIn(1)", "b")}) ==
          HarnessErrorKind::DuplicateId);
    // The same id under two systems is fine.
    CHECK(evaluate({gen(0, "x", "ZoomIn(1)", "a"), gen(0, "y", "ZoomIn(1)", "b")}).size() == 2);
}

TEST_CASE("failed records are scored with an empty prediction") {
    auto failed = gen(1, "llm", "ZoomIn(2)", "ZoomIn(2)");
    failed.failed = true;
    failed.error = "Timeout: slow";
    const auto r = evaluate({gen(0, "llm", "ZoomIn(1)", "ZoomIn(1)"), failed}).at(0);
    CHECK(*r.ema == 0.5);
    CHECK(*r.ls == 0.5);
    CHECK(*r.rouge1 == 0.5);

    auto failed_cls = cls(1, "svm", "ZoomIn", "ZoomIn");
    failed_cls.failed = true;
    const auto c = evaluate({cls(0, "svm", "ZoomIn", "ZoomIn"), failed_cls}).at(0);
    CHECK(*c.accuracy == 0.5);
}

TEST_CASE("systems keep first-appearance order and records are sorted by id") {
    const auto reports =
        evaluate({gen(5, "b", "ZoomIn(1)", "ZoomIn(1)"), gen(1, "a", "ZoomIn(1)", "x"), gen(2, "b", "ZoomIn(1)", "y")});
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].system == "b");
    CHECK(reports[1].system == "a");
    CHECK(reports[0].n == 2);
}

TEST_CASE("rule and classifier predictors produce the contract") {
    const auto samples = generate(9, 3);
    const auto rules = predict_rules(RuleSet::builtin(), samples);
    REQUIRE(rules.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(rules[i].id == samples[i].id);
        CHECK(rules[i].system == "rules");
        CHECK(rules[i].reference == samples[i].call);
        CHECK(rules[i].prediction == samples[i].call);
    }
    Sample odd{999, "ZoomIn", "What is the weather like", "ZoomIn(1)"};
    const auto miss = predict_rules(RuleSet::builtin(), {odd});
    CHECK(miss[0].failed);
    CHECK(miss[0].error == "NoMatch");
    CHECK(miss[0].prediction.empty());

    const AnyModel model = train_svm(generate(2, 10));
    const auto preds = predict_classifier(model, samples, "svm");
    CHECK(preds.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(preds[i].kind == PredictionKind::Classification);
        CHECK(preds[i].reference == samples[i].function);
    }
}

TEST_CASE("csv report: header, absent cells and round trip") {
    std::vector<PredictionRecord> records;
    for (int i = 0; i < 4; ++i) records.push_back(gen(i, "rules", "ZoomIn(1)", i == 0 ? "ZoomIn(2)" : "ZoomIn(1)"));
    for (int i = 0; i < 4; ++i) records.push_back(cls(i, "svm, tuned", "Draw", i == 0 ? "Move" : "Draw"));
    const auto reports = evaluate(records);
    const std::string csv = report_csv(reports);
    CHECK(csv.rfind("system,kind,n,ema,ls,rouge1,rougeL,precision,recall,f1,accuracy\n", 0) == 0);
    CHECK(csv.find("rules,generation,4,0.75,") != std::string::npos);
    CHECK(csv.find(",-,-,-,-\n") != std::string::npos);
    CHECK(csv.find("\"svm, tuned\",classification,4,-,-,-,-,") != std::string::npos);
    const auto back = parse_report_csv(csv);
    CHECK(back == reports);
    CHECK(report_csv(back) == csv);
    CHECK_THROWS_AS(parse_report_csv("nope\n"), HarnessError);
    CHECK_THROWS_AS(parse_report_csv("system,kind,n,ema,ls,rouge1,rougeL,precision,recall,f1,accuracy\nx,generation,1\n"),
                    HarnessError);
}

TEST_CASE("markdown report") {
    const auto reports = evaluate({gen(0, "rules", "ZoomIn(1)", "ZoomIn(1)"), cls(0, "svm", "Draw", "Draw")});
    const std::string md = report_markdown(reports);
    CHECK(md.find("| System | Type | N | EMA | LS | ROUGE-1 | ROUGE-L | Precision | Recall | F1 Score | Accuracy |") !=
          std::string::npos);
    CHECK(md.find("| rules | Generation | 1 | 1.0000 | 1.0000 | 1.0000 | 1.0000 | - | - | - | - |") !=
          std::string::npos);
    CHECK(md == report_markdown(reports));
    CHECK(render_report(reports, ReportFormat::Markdown) == md);
    CHECK(parse_report_format("md") == ReportFormat::Markdown);
    CHECK(parse_report_format("markdown") == ReportFormat::Markdown);
    CHECK(parse_report_format("csv") == ReportFormat::Csv);
    CHECK_FALSE(parse_report_format("html").has_value());
}

TEST_CASE("predictions file round trip") {
    auto a = gen(0, "llm", "ZoomIn(1)", "ZoomIn(1)");
    auto b = gen(1, "llm", "AddWMS('u')", "");
    b.failed = true;
    b.error = "RateLimited: 429";
    const auto path = std::filesystem::temp_directory_path() / "geocmd_harness_preds.jsonl";
    save_predictions({a, b}, path);
    CHECK(load_predictions(path) == std::vector<PredictionRecord>{a, b});
    CHECK(record_from_json_line(to_jsonl_line(b)) == b);
    CHECK_THROWS_AS(record_from_json_line("{\"id\": 1}"), PredictionFileError);
    std::filesystem::remove(path);
}
