#pragma once

// predict -> evaluate -> report over the predictions JSONL contract.

#include "geocmd/dataset.hpp"
#include "geocmd/error.hpp"
#include "geocmd/model_io.hpp"
#include "geocmd/predictions.hpp"
#include "geocmd/rule_translator.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geocmd {

enum class HarnessErrorKind { MixedKinds, EmptySystem, DuplicateId, MalformedReport };

class HarnessError : public Error {
public:
    HarnessError(HarnessErrorKind kind, const std::string& message);
    HarnessErrorKind kind() const noexcept { return kind_; }

private:
    HarnessErrorKind kind_;
};

// Classification records: reference is the true function label, prediction
// the predicted label.
std::vector<PredictionRecord> predict_classifier(const AnyModel& model, const std::vector<Sample>& samples,
                                                 const std::string& system);

// Generation records. NoMatch is a failed record with an empty prediction.
std::vector<PredictionRecord> predict_rules(const RuleSet& rules, const std::vector<Sample>& samples,
                                            const std::string& system = "rules");

// One row per system. Metrics that do not apply to the kind are nullopt.
struct MetricReport {
    std::string system;
    PredictionKind kind = PredictionKind::Generation;
    std::size_t n = 0;
    std::optional<double> ema;
    std::optional<double> ls;
    std::optional<double> rouge1;
    std::optional<double> rougeL;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> accuracy;

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

// Systems in order of first appearance; records sorted by id within a system.
// Failed records are scored with an empty prediction. Classification metrics
// are macro averages over the ten function labels.
std::vector<MetricReport> evaluate(const std::vector<PredictionRecord>& records);

enum class ReportFormat { Csv, Markdown };

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept;

// CSV header: system,kind,n,ema,ls,rouge1,rougeL,precision,recall,f1,accuracy
// Numbers are shortest round-trip decimals; "-" marks an absent metric.
std::string report_csv(const std::vector<MetricReport>& reports);
std::string report_markdown(const std::vector<MetricReport>& reports);
std::string render_report(const std::vector<MetricReport>& reports, ReportFormat format);

std::vector<MetricReport> parse_report_csv(std::string_view text);

} // namespace geocmd
