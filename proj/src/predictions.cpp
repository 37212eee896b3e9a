#include "geocmd/predictions.hpp"

#include <json.hpp>

#include <fstream>

namespace geocmd {

std::string_view to_string(PredictionKind kind) noexcept {
    return kind == PredictionKind::Generation ? "generation" : "classification";
}

std::optional<PredictionKind> parse_prediction_kind(std::string_view text) noexcept {
    if (text == "generation") return PredictionKind::Generation;
    if (text == "classification") return PredictionKind::Classification;
    return std::nullopt;
}

std::string to_jsonl_line(const PredictionRecord& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["system"] = r.system;
    j["kind"] = to_string(r.kind);
    j["query"] = r.query;
    j["reference"] = r.reference;
    j["prediction"] = r.prediction;
    j["failed"] = r.failed;
    if (!r.error.empty()) j["error"] = r.error;
    return j.dump();
}

PredictionRecord record_from_json_line(std::string_view line) {
    try {
        const auto j = nlohmann::json::parse(line);
        PredictionRecord r;
        r.id = j.at("id").get<std::uint64_t>();
        r.system = j.at("system").get<std::string>();
        const auto kind = parse_prediction_kind(j.at("kind").get<std::string>());
        if (!kind) throw PredictionFileError("unknown kind " + j.at("kind").dump());
        r.kind = *kind;
        r.query = j.at("query").get<std::string>();
        r.reference = j.at("reference").get<std::string>();
        r.prediction = j.at("prediction").get<std::string>();
        r.failed = j.at("failed").get<bool>();
        if (j.contains("error")) r.error = j.at("error").get<std::string>();
        if (r.system.empty()) throw PredictionFileError("empty system name");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw PredictionFileError(e.what());
    }
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw PredictionFileError("cannot open " + path.string());
    std::vector<PredictionRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(record_from_json_line(line));
        } catch (const PredictionFileError& e) {
            throw PredictionFileError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void save_predictions(const std::vector<PredictionRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PredictionFileError("cannot write " + path.string());
    for (const auto& r : records) out << to_jsonl_line(r) << '\n';
}

} // namespace geocmd
