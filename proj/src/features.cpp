#include "geocmd/features.hpp"

#include "geocmd/model_error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace geocmd {

std::string_view to_string(ModelErrorKind kind) noexcept {
    switch (kind) {
    case ModelErrorKind::EmptyVocabulary: return "EmptyVocabulary";
    case ModelErrorKind::SingleClassTraining: return "SingleClassTraining";
    case ModelErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ModelErrorKind::VersionMismatch: return "VersionMismatch";
    case ModelErrorKind::CorruptModel: return "CorruptModel";
    case ModelErrorKind::InvalidArgument: return "InvalidArgument";
    case ModelErrorKind::Io: return "IoError";
    }
    return "ModelError";
}

std::vector<std::string> tokenize_query(std::string_view query) {
    std::vector<std::string> tokens;
    std::string current;
    bool numeric = true;
    const auto flush = [&] {
        if (current.empty()) return;
        tokens.push_back(numeric ? std::string(kNumberToken) : std::move(current));
        current.clear();
        numeric = true;
    };
    for (const char ch : query) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 128 && std::isalnum(c)) {
            current += static_cast<char>(std::tolower(c));
            if (!std::isdigit(c)) numeric = false;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> query_terms(std::string_view query) {
    std::vector<std::string> terms = tokenize_query(query);
    const std::size_t n = terms.size();
    for (std::size_t i = 0; i + 1 < n; ++i) terms.push_back(terms[i] + " " + terms[i + 1]);
    return terms;
}

double FeatureVector::norm() const noexcept {
    double sq = 0.0;
    for (const auto& e : entries) sq += e.weight * e.weight;
    return std::sqrt(sq);
}

double FeatureVector::dot(const std::vector<double>& dense) const noexcept {
    double s = 0.0;
    for (const auto& e : entries) s += e.weight * dense[e.index];
    return s;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<double> idf)
    : terms_(std::move(terms)), idf_(std::move(idf)) {
    if (terms_.size() != idf_.size())
        throw ModelError(ModelErrorKind::CorruptModel, "vocabulary terms/idf length mismatch");
    lookup_.reserve(terms_.size());
    for (std::uint32_t i = 0; i < terms_.size(); ++i)
        if (!lookup_.emplace(terms_[i], i).second)
            throw ModelError(ModelErrorKind::CorruptModel, "duplicate vocabulary term '" + terms_[i] + "'");
}

std::int64_t Vocabulary::index_of(std::string_view term) const {
    const auto it = lookup_.find(std::string(term));
    return it == lookup_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

FeatureVector Vocabulary::featurize(std::string_view query) const {
    std::map<std::uint32_t, double> counts;
    for (const auto& term : query_terms(query)) {
        const auto it = lookup_.find(term);
        if (it != lookup_.end()) counts[it->second] += 1.0;
    }
    FeatureVector fv;
    fv.dimension = size();
    fv.entries.reserve(counts.size());
    for (const auto& [index, tf] : counts) fv.entries.push_back({index, tf * idf_[index]});
    const double n = fv.norm();
    if (n > 0.0)
        for (auto& e : fv.entries) e.weight /= n;
    return fv;
}

Vocabulary fit_vocabulary(const std::vector<Sample>& train) {
    if (train.empty()) throw ModelError(ModelErrorKind::EmptyVocabulary, "empty training set");
    std::map<std::string, std::size_t> df;
    for (const Sample& s : train) {
        const auto terms = query_terms(s.query);
        for (const auto& t : std::set<std::string>(terms.begin(), terms.end())) ++df[t];
    }
    if (df.empty()) throw ModelError(ModelErrorKind::EmptyVocabulary, "training queries contain no terms");

    const double n_docs = static_cast<double>(train.size());
    std::vector<std::string> terms;
    std::vector<double> idf;
    terms.reserve(df.size());
    idf.reserve(df.size());
    for (const auto& [term, count] : df) {
        terms.push_back(term);
        idf.push_back(std::log((1.0 + n_docs) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return Vocabulary(std::move(terms), std::move(idf));
}

} // namespace geocmd
