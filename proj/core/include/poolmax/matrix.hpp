#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace poolmax {

/// Observation-major storage: row i is one observation vector.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// An n x p panel of finite observations with n >= 2 and p >= 1. Instances
/// are immutable once constructed, so they can be shared across threads.
class DataMatrix {
public:
    /// Validates and takes ownership. Throws CellError(NonFinite) at the first
    /// NaN/Inf in row-major order, or Error(TooSmall).
    explicit DataMatrix(Matrix values);

    [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    [[nodiscard]] std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    [[nodiscard]] const Matrix& values() const noexcept { return values_; }

private:
    Matrix values_;
};

/// Checks the DataMatrix invariants and returns the validated panel.
[[nodiscard]] DataMatrix validate_matrix(Matrix values);

}  // namespace poolmax
