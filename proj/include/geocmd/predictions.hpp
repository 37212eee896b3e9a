#pragma once

// Predictions JSONL, one record per line:
//   {"id", "system", "kind", "query", "reference", "prediction", "failed"}
// plus an optional "error" string on failed records. Any producer, including
// out-of-tree ones, takes part in evaluation by writing this file.

#include "geocmd/error.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geocmd {

enum class PredictionKind { Generation, Classification };

std::string_view to_string(PredictionKind kind) noexcept;
std::optional<PredictionKind> parse_prediction_kind(std::string_view text) noexcept;

struct PredictionRecord {
    std::uint64_t id = 0;
    std::string system;
    PredictionKind kind = PredictionKind::Generation;
    std::string query;
    // Generation: the reference call string. Classification: the true label.
    std::string reference;
    // Generation: the predicted call string. Classification: the predicted label.
    std::string prediction;
    bool failed = false;
    std::string error;

    friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

class PredictionFileError : public Error {
public:
    explicit PredictionFileError(const std::string& message) : Error("MalformedPredictions", message) {}
};

std::string to_jsonl_line(const PredictionRecord& record);
PredictionRecord record_from_json_line(std::string_view line);

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);
void save_predictions(const std::vector<PredictionRecord>& records, const std::filesystem::path& path);

} // namespace geocmd
