#include "poolmax/matrix.hpp"

#include "poolmax/error.hpp"

#include <cmath>
#include <string>

namespace poolmax {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 2 || values_.cols() < 1) {
        fail(ErrorKind::TooSmall, "data matrix needs at least 2 rows and 1 column, got " +
                                      std::to_string(values_.rows()) + "x" + std::to_string(values_.cols()));
    }
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        for (Eigen::Index j = 0; j < values_.cols(); ++j) {
            if (!std::isfinite(values_(i, j))) {
                throw CellError(ErrorKind::NonFinite,
                                "non-finite entry at row " + std::to_string(i) + ", column " + std::to_string(j),
                                static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            }
        }
    }
}

DataMatrix validate_matrix(Matrix values) {
    return DataMatrix(std::move(values));
}

}  // namespace poolmax
