#pragma once

// TF-IDF featurization shared by the SVM and the random forest.
//
// Tokens are lowercase alphanumeric runs; purely numeric tokens become the
// placeholder "<num>". Terms are the unigrams plus adjacent bigrams
// ("zoom in"), weights are tf * idf with the smoothed idf
// ln((1 + N) / (1 + df)) + 1, and every non-empty vector is L2-normalized.

#include "geocmd/dataset.hpp"
#include "geocmd/error.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace geocmd {

inline constexpr std::string_view kNumberToken = "<num>";

std::vector<std::string> tokenize_query(std::string_view query);

// Unigrams followed by bigrams (joined with a single space).
std::vector<std::string> query_terms(std::string_view query);

struct SparseEntry {
    std::uint32_t index = 0;
    double weight = 0.0;
    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Entries sorted by index, no duplicates.
struct FeatureVector {
    std::uint32_t dimension = 0;
    std::vector<SparseEntry> entries;

    bool empty() const noexcept { return entries.empty(); }
    double norm() const noexcept;
    double dot(const std::vector<double>& dense) const noexcept;
};

class Vocabulary {
public:
    Vocabulary() = default;
    // terms and idf are parallel; terms must be unique.
    Vocabulary(std::vector<std::string> terms, std::vector<double> idf);

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(terms_.size()); }
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    const std::vector<double>& idf() const noexcept { return idf_; }

    // -1 if the term is unknown.
    std::int64_t index_of(std::string_view term) const;

    FeatureVector featurize(std::string_view query) const;

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.terms_ == b.terms_ && a.idf_ == b.idf_;
    }

private:
    std::vector<std::string> terms_;
    std::vector<double> idf_;
    std::unordered_map<std::string, std::uint32_t> lookup_;
};

// Terms are indexed in lexicographic order. Throws ModelError(EmptyVocabulary)
// when the corpus has no terms.
Vocabulary fit_vocabulary(const std::vector<Sample>& train);

inline FeatureVector featurize(const Vocabulary& vocab, std::string_view query) {
    return vocab.featurize(query);
}

} // namespace geocmd
