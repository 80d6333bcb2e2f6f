#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thors {

enum class ErrorCode {
    InvalidArgument,
    MissingClass,
    NonFiniteScore,
    RankOutOfRange,
    EmptyTestSet,
    DomainError,
    Unachievable,
    MissingColumn,
    UnparseableCell,
    SingleClassData,
    SplitFailed,
    EmptyResample,
    NotProbabilityScorer,
    Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace thors
