#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace poolmax {

// Every failure raised by the library carries one of these kinds. The CLI maps
// kinds onto exit codes, so new kinds must also be classified in category().
enum class ErrorKind {
    // data / shape
    NonFinite,
    TooSmall,
    DimensionMismatch,
    ShapeMismatch,
    ParseError,
    RaggedRows,
    InsufficientHistory,
    TooFewObservations,
    TooFewExceedances,
    // configuration
    NotCoprime,
    BadCardinality,
    DTooSmall,
    TooLarge,
    BadTheta,
    ProfileOverflow,
    OutOfRange,
    BadParams,
    BadThreshold,
    Usage,
    // numerics
    DegenerateVariance,
    DegenerateSeries,
    EmptyDraws,
    NotPSD,
    NonConvergence,
    GpdNonConvergence,
};

enum class ErrorCategory { Usage, Data, Degenerate };

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;
[[nodiscard]] ErrorCategory category(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Thrown when a specific row/column of the input is at fault.
class CellError : public Error {
public:
    CellError(ErrorKind kind, const std::string& message, std::size_t row, std::size_t col)
        : Error(kind, message), row_(row), col_(col) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

// Thrown when a pooled subset (or a marginal column) has zero sample variance.
class DegenerateVarianceError : public Error {
public:
    DegenerateVarianceError(const std::string& message, std::size_t index)
        : Error(ErrorKind::DegenerateVariance, message), index_(index) {}

    // 0-based subset (or column) index.
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace poolmax
