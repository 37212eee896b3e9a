#pragma once

// Evaluation metrics: exact-match accuracy, Levenshtein similarity,
// ROUGE-1 / ROUGE-L recall over a call-aware tokenizer, and confusion-matrix
// classification scores.

#include "geocmd/error.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geocmd {

enum class MetricErrorKind { EmptyInput, UnknownLabel };

class MetricError : public Error {
public:
    MetricError(MetricErrorKind kind, const std::string& message);
    MetricErrorKind kind() const noexcept { return kind_; }

private:
    MetricErrorKind kind_;
};

// (reference, prediction)
using StringPair = std::pair<std::string, std::string>;

// Fraction of pairs equal after trimming surrounding whitespace.
double exact_match_accuracy(const std::vector<StringPair>& pairs);

// Unit-cost edit distance over Unicode code points (bytes if the input is
// not valid UTF-8).
std::size_t levenshtein_distance(std::string_view a, std::string_view b);

// 1 - D / max(|a|, |b|); 1 when both are empty.
double levenshtein_similarity(std::string_view a, std::string_view b);

// Spaces around ( ) [ ] , ' then split on whitespace.
std::vector<std::string> tokenize_for_rouge(std::string_view s);

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Clipped unigram recall against the reference.
double rouge1(std::string_view reference, std::string_view candidate);
// LCS length over reference length.
double rougeL(std::string_view reference, std::string_view candidate);

struct ClassMetrics {
    std::string label;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0; // (TP + TN) / N for this class
};

struct ClassificationReport {
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0; // correct / N
    std::size_t total = 0;
};

// (true label, predicted label). An empty predicted label means "no
// prediction": it counts against recall of the true class and is nobody's
// false positive. Any other label outside `classes` is UnknownLabel.
// 0/0 ratios are defined as 0.
ClassificationReport classification_report(const std::vector<StringPair>& pairs,
                                           const std::vector<std::string>& classes);

} // namespace geocmd
