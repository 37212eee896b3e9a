#pragma once

#include "geocmd/error.hpp"

#include <string>
#include <string_view>

namespace geocmd {

enum class ModelErrorKind {
    EmptyVocabulary,
    SingleClassTraining,
    DimensionMismatch,
    VersionMismatch,
    CorruptModel,
    InvalidArgument,
    Io,
};

std::string_view to_string(ModelErrorKind kind) noexcept;

class ModelError : public Error {
public:
    ModelError(ModelErrorKind kind, const std::string& message)
        : Error(std::string(to_string(kind)), message), kind_(kind) {}

    ModelErrorKind kind() const noexcept { return kind_; }

private:
    ModelErrorKind kind_;
};

} // namespace geocmd
