#pragma once

// Versioned JSON model files shared by the CLI, the Python module and the
// browser build:
//
//   {"format_version": 1, "kind": "svm" | "rf", "classes": [...],
//    "vocabulary": {"terms": [...], "idf": [...]},
//    "hyperparameters": {...}, "body": {...}}
//
// svm body: {"weights": [[...] per class], "bias": [...]}
// rf body:  {"trees": [[[feature, threshold, left, right, label, impurity, n_samples], ...], ...]}

#include "geocmd/forest.hpp"
#include "geocmd/svm.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

namespace geocmd {

inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<SvmModel, ForestModel>;

std::string to_model_text(const SvmModel& model);
std::string to_model_text(const ForestModel& model);

// Throws ModelError(VersionMismatch | CorruptModel).
AnyModel model_from_text(std::string_view text);

void save_model(const SvmModel& model, const std::filesystem::path& path);
void save_model(const ForestModel& model, const std::filesystem::path& path);
AnyModel load_model(const std::filesystem::path& path);

// Label predicted by either model kind for a raw query.
std::string predict_label(const AnyModel& model, std::string_view query);

} // namespace geocmd
