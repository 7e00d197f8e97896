#include "poolmax/stats.hpp"

#include "poolmax/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace poolmax::stats {

double normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) {
        fail(ErrorKind::OutOfRange, "normal quantile needs prob in (0,1), got " + std::to_string(prob));
    }
    return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), prob);
}

std::size_t ceil_rank(double level, std::size_t m) noexcept {
    const double scaled = level * static_cast<double>(m);
    auto rank = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
    return std::clamp<std::size_t>(rank, 1, m);
}

double order_statistic(std::span<const double> values, std::size_t k) {
    if (values.empty()) fail(ErrorKind::EmptyDraws, "order statistic of an empty sample");
    if (k < 1 || k > values.size()) {
        fail(ErrorKind::OutOfRange, "order statistic rank " + std::to_string(k) + " outside [1, " +
                                        std::to_string(values.size()) + "]");
    }
    std::vector<double> copy(values.begin(), values.end());
    auto nth = copy.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(copy.begin(), nth, copy.end());
    return *nth;
}

double mean(std::span<const double> values) noexcept {
    double sum = 0.0;
    for (double v : values) sum += v;
    return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

double variance_n(std::span<const double> values) noexcept {
    if (values.empty()) return 0.0;
    const double mu = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    return ss / static_cast<double>(values.size());
}

}  // namespace poolmax::stats
