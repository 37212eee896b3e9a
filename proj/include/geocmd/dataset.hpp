#pragma once

// Template-based corpus generator, seeded train/val/test split and the
// dataset JSONL format ({"id","function","query","call"} per line).

#include "geocmd/error.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace geocmd {

struct Sample {
    std::uint64_t id = 0;
    std::string function;
    std::string query;
    std::string call;

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct SplitSpec {
    std::uint64_t seed = 1;
    double train_fraction = 0.8;
    double val_fraction_of_test = 0.5;
};

struct DatasetSplit {
    std::vector<Sample> train;
    std::vector<Sample> val;
    std::vector<Sample> test;
};

enum class DatasetErrorKind { TemplateExhaustion, MalformedRecord, InvalidCall, InvalidArgument, Io };

class DatasetError : public Error {
public:
    DatasetError(DatasetErrorKind kind, const std::string& message);
    DatasetErrorKind kind() const noexcept { return kind_; }

private:
    DatasetErrorKind kind_;
};

inline constexpr std::uint32_t kDefaultPerFunction = 200;

// Exactly per_function samples for each of the ten functions, in function
// order, ids 0..N-1, all queries unique. Same arguments, same bytes.
std::vector<Sample> generate(std::uint64_t seed, std::uint32_t per_function = kDefaultPerFunction);

// Shuffle with a seeded RNG, first train_fraction to train, the remainder
// split val/test by val_fraction_of_test. Rounding: floor(n * fraction).
DatasetSplit split(const std::vector<Sample>& samples, const SplitSpec& spec = {});

// Throws DatasetError(InvalidCall) if the call does not parse or its function
// differs from sample.function.
void validate_sample(const Sample& sample);

std::vector<Sample> load_jsonl(const std::filesystem::path& path);
void save_jsonl(const std::vector<Sample>& samples, const std::filesystem::path& path);

// Number of query templates shipped for a function (for coverage checks).
std::size_t template_count(std::string_view function);

} // namespace geocmd
