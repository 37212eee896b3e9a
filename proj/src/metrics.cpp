#include "geocmd/metrics.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace geocmd {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(b, e - b + 1);
}

// Decodes UTF-8; falls back to one unit per byte on malformed input.
std::vector<char32_t> code_points(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
        bool ok = len > 0 && i + static_cast<std::size_t>(len) <= s.size();
        char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
        for (int k = 1; ok && k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
            if ((cc >> 6) != 0x2) ok = false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!ok) {
            out.clear();
            for (const char b : s) out.push_back(static_cast<unsigned char>(b));
            return out;
        }
        out.push_back(cp);
        i += static_cast<std::size_t>(len);
    }
    return out;
}

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

MetricError::MetricError(MetricErrorKind kind, const std::string& message)
    : Error(kind == MetricErrorKind::EmptyInput ? "EmptyInput" : "UnknownLabel", message), kind_(kind) {}

double exact_match_accuracy(const std::vector<StringPair>& pairs) {
    if (pairs.empty()) throw MetricError(MetricErrorKind::EmptyInput, "exact match over zero pairs");
    std::size_t hits = 0;
    for (const auto& [ref, pred] : pairs)
        if (trim(ref) == trim(pred)) ++hits;
    return ratio(hits, pairs.size());
}

std::size_t levenshtein_distance(std::string_view a, std::string_view b) {
    const auto s = code_points(a);
    const auto t = code_points(b);
    std::vector<std::size_t> prev(t.size() + 1), cur(t.size() + 1);
    for (std::size_t j = 0; j <= t.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= s.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= t.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[t.size()];
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
    const std::size_t longest = std::max(code_points(a).size(), code_points(b).size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein_distance(a, b)) / static_cast<double>(longest);
}

std::vector<std::string> tokenize_for_rouge(std::string_view s) {
    std::vector<std::string> tokens;
    std::string current;
    const auto flush = [&] {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
    };
    for (const char c : s) {
        switch (c) {
        case '(': case ')': case '[': case ']': case ',': case '\'':
            flush();
            tokens.emplace_back(1, c);
            break;
        case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
            flush();
            break;
        default:
            current += c;
        }
    }
    flush();
    return tokens;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rouge1(std::string_view reference, std::string_view candidate) {
    const auto ref = tokenize_for_rouge(reference);
    const auto cand = tokenize_for_rouge(candidate);
    if (ref.empty()) return cand.empty() ? 1.0 : 0.0;
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& t : cand) ++counts[t];
    std::size_t overlap = 0;
    for (const auto& t : ref) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    return ratio(overlap, ref.size());
}

double rougeL(std::string_view reference, std::string_view candidate) {
    const auto ref = tokenize_for_rouge(reference);
    const auto cand = tokenize_for_rouge(candidate);
    if (ref.empty()) return cand.empty() ? 1.0 : 0.0;
    return ratio(lcs_length(ref, cand), ref.size());
}

ClassificationReport classification_report(const std::vector<StringPair>& pairs,
                                           const std::vector<std::string>& classes) {
    if (pairs.empty()) throw MetricError(MetricErrorKind::EmptyInput, "classification report over zero pairs");
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < classes.size(); ++k) index.emplace(classes[k], k);

    ClassificationReport report;
    report.total = pairs.size();
    report.per_class.resize(classes.size());
    for (std::size_t k = 0; k < classes.size(); ++k) report.per_class[k].label = classes[k];

    std::size_t correct = 0;
    for (const auto& [truth, pred] : pairs) {
        const auto t = index.find(truth);
        if (t == index.end()) throw MetricError(MetricErrorKind::UnknownLabel, "unknown true label '" + truth + "'");
        if (pred.empty()) {
            ++report.per_class[t->second].fn;
            continue;
        }
        const auto p = index.find(pred);
        if (p == index.end()) throw MetricError(MetricErrorKind::UnknownLabel, "unknown predicted label '" + pred + "'");
        if (t->second == p->second) {
            ++report.per_class[t->second].tp;
            ++correct;
        } else {
            ++report.per_class[t->second].fn;
            ++report.per_class[p->second].fp;
        }
    }

    for (auto& c : report.per_class) {
        c.tn = report.total - c.tp - c.fp - c.fn;
        c.precision = ratio(c.tp, c.tp + c.fp);
        c.recall = ratio(c.tp, c.tp + c.fn);
        c.f1 = c.precision + c.recall > 0.0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
        c.accuracy = ratio(c.tp + c.tn, report.total);
        report.macro_precision += c.precision;
        report.macro_recall += c.recall;
        report.macro_f1 += c.f1;
    }
    if (!classes.empty()) {
        const auto k = static_cast<double>(classes.size());
        report.macro_precision /= k;
        report.macro_recall /= k;
        report.macro_f1 /= k;
    }
    report.accuracy = ratio(correct, report.total);
    return report;
}

} // namespace geocmd
