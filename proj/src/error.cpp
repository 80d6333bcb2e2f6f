#include "thors/error.hpp"

namespace thors {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::Unachievable: return "Unachievable";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnparseableCell: return "UnparseableCell";
    case ErrorCode::SingleClassData: return "SingleClassData";
    case ErrorCode::SplitFailed: return "SplitFailed";
    case ErrorCode::EmptyResample: return "EmptyResample";
    case ErrorCode::NotProbabilityScorer: return "NotProbabilityScorer";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace thors
