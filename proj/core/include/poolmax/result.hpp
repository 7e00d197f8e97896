#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string_view>
#include <vector>

namespace poolmax {

enum class MethodTag { Naive, SubsetsPool, Marginal };

[[nodiscard]] std::string_view to_string(MethodTag tag) noexcept;
[[nodiscard]] MethodTag method_tag_from_string(std::string_view name);

/// Outcome of one hypothesis test.
///
/// For the bootstrap-calibrated methods reject == (statistic > critical_value)
/// and p_value lies in [1/(B+1), 1]. For the naive test the decision is
/// |statistic| > critical_value with a normal critical value.
struct TestResult {
    double statistic = 0.0;
    double critical_value = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double alpha = 0.05;
    std::optional<std::vector<double>> per_subset_t;
    MethodTag method_tag = MethodTag::SubsetsPool;
};

void to_json(nlohmann::json& j, const TestResult& r);
void from_json(const nlohmann::json& j, TestResult& r);

}  // namespace poolmax
