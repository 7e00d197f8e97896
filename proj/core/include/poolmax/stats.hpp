#pragma once

#include <cstddef>
#include <span>

namespace poolmax::stats {

[[nodiscard]] double normal_cdf(double x) noexcept;
[[nodiscard]] double normal_quantile(double prob);

/// 1-based rank ceil(level * m), guarded against representation error in the
/// product (0.99 * 100 must give 99, not 100) and clamped to [1, m].
[[nodiscard]] std::size_t ceil_rank(double level, std::size_t m) noexcept;

/// The k-th smallest value (1-based) of `values`; copies and partially sorts.
[[nodiscard]] double order_statistic(std::span<const double> values, std::size_t k);

[[nodiscard]] double mean(std::span<const double> values) noexcept;

/// Mean-centred variance with divisor m (not m - 1).
[[nodiscard]] double variance_n(std::span<const double> values) noexcept;

}  // namespace poolmax::stats
