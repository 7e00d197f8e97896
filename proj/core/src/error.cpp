#include "poolmax/error.hpp"

namespace poolmax {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::TooSmall: return "TooSmall";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::RaggedRows: return "RaggedRows";
        case ErrorKind::InsufficientHistory: return "InsufficientHistory";
        case ErrorKind::TooFewObservations: return "TooFewObservations";
        case ErrorKind::TooFewExceedances: return "TooFewExceedances";
        case ErrorKind::NotCoprime: return "NotCoprime";
        case ErrorKind::BadCardinality: return "BadCardinality";
        case ErrorKind::DTooSmall: return "DTooSmall";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::BadTheta: return "BadTheta";
        case ErrorKind::ProfileOverflow: return "ProfileOverflow";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::BadParams: return "BadParams";
        case ErrorKind::BadThreshold: return "BadThreshold";
        case ErrorKind::Usage: return "Usage";
        case ErrorKind::DegenerateVariance: return "DegenerateVariance";
        case ErrorKind::DegenerateSeries: return "DegenerateSeries";
        case ErrorKind::EmptyDraws: return "EmptyDraws";
        case ErrorKind::NotPSD: return "NotPSD";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::GpdNonConvergence: return "GpdNonConvergence";
    }
    return "Unknown";
}

ErrorCategory category(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonFinite:
        case ErrorKind::TooSmall:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::ShapeMismatch:
        case ErrorKind::ParseError:
        case ErrorKind::RaggedRows:
        case ErrorKind::InsufficientHistory:
        case ErrorKind::TooFewObservations:
        case ErrorKind::TooFewExceedances:
            return ErrorCategory::Data;
        case ErrorKind::NotCoprime:
        case ErrorKind::BadCardinality:
        case ErrorKind::DTooSmall:
        case ErrorKind::TooLarge:
        case ErrorKind::BadTheta:
        case ErrorKind::ProfileOverflow:
        case ErrorKind::OutOfRange:
        case ErrorKind::BadParams:
        case ErrorKind::BadThreshold:
        case ErrorKind::Usage:
            return ErrorCategory::Usage;
        case ErrorKind::DegenerateVariance:
        case ErrorKind::DegenerateSeries:
        case ErrorKind::EmptyDraws:
        case ErrorKind::NotPSD:
        case ErrorKind::NonConvergence:
        case ErrorKind::GpdNonConvergence:
            return ErrorCategory::Degenerate;
    }
    return ErrorCategory::Data;
}

void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace poolmax
