#include "poolmax/result.hpp"

#include "poolmax/error.hpp"

#include <string>

namespace poolmax {

std::string_view to_string(MethodTag tag) noexcept {
    switch (tag) {
        case MethodTag::Naive: return "Naive";
        case MethodTag::SubsetsPool: return "SubsetsPool";
        case MethodTag::Marginal: return "Marginal";
    }
    return "SubsetsPool";
}

MethodTag method_tag_from_string(std::string_view name) {
    if (name == "Naive") return MethodTag::Naive;
    if (name == "SubsetsPool") return MethodTag::SubsetsPool;
    if (name == "Marginal") return MethodTag::Marginal;
    fail(ErrorKind::ParseError, "unknown method tag '" + std::string(name) + "'");
}

void to_json(nlohmann::json& j, const TestResult& r) {
    j = nlohmann::json{{"statistic", r.statistic},
                       {"critical_value", r.critical_value},
                       {"p_value", r.p_value},
                       {"reject", r.reject},
                       {"alpha", r.alpha},
                       {"method_tag", std::string(to_string(r.method_tag))}};
    if (r.per_subset_t) j["per_subset_t"] = *r.per_subset_t;
}

void from_json(const nlohmann::json& j, TestResult& r) {
    r.statistic = j.at("statistic").get<double>();
    r.critical_value = j.at("critical_value").get<double>();
    r.p_value = j.at("p_value").get<double>();
    r.reject = j.at("reject").get<bool>();
    r.alpha = j.at("alpha").get<double>();
    r.method_tag = method_tag_from_string(j.at("method_tag").get<std::string>());
    if (j.contains("per_subset_t")) {
        r.per_subset_t = j.at("per_subset_t").get<std::vector<double>>();
    } else {
        r.per_subset_t.reset();
    }
}

}  // namespace poolmax
