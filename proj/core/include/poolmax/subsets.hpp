#pragma once

#include "poolmax/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace poolmax {

/// A sorted set of 1-based column indices.
using IndexSet = std::vector<std::size_t>;

/// d index subsets of {1..p}, each of cardinality q. The constructor checks
/// that every member has q distinct indices in range and stores them sorted.
class SubsetFamily {
public:
    SubsetFamily(std::size_t p, std::size_t q, std::vector<IndexSet> members);

    [[nodiscard]] std::size_t p() const noexcept { return p_; }
    [[nodiscard]] std::size_t q() const noexcept { return q_; }
    [[nodiscard]] std::size_t d() const noexcept { return members_.size(); }
    [[nodiscard]] const std::vector<IndexSet>& members() const noexcept { return members_; }
    [[nodiscard]] const IndexSet& operator[](std::size_t l) const noexcept { return members_[l]; }

    friend bool operator==(const SubsetFamily&, const SubsetFamily&) = default;

private:
    std::size_t p_;
    std::size_t q_;
    std::vector<IndexSet> members_;
};

[[nodiscard]] std::size_t gcd(std::size_t a, std::size_t b);

/// Nearest q' (searching outward from q, smaller first on ties) with
/// 1 <= q' < p and gcd(p, q') = 1; nullopt when p < 2.
[[nodiscard]] std::optional<std::size_t> nearest_coprime(std::size_t p, std::size_t q) noexcept;

/// The p cyclic windows {l, ..., l+q-1}, indices above p wrapping to index - p.
/// Requires 1 <= q < p and gcd(p, q) = 1.
[[nodiscard]] SubsetFamily circular_family(std::size_t p, std::size_t q);

/// `count` subsets of q distinct indices, each drawn uniformly without
/// replacement. Subsets are not deduplicated against one another.
[[nodiscard]] std::vector<IndexSet> random_extension(std::size_t p, std::size_t q, std::size_t count,
                                                     const RngSpec& rng);

/// Circular block followed by d - p extension subsets. User-supplied subsets
/// occupy the start of the extension block; any remaining slots are drawn by
/// random_extension.
[[nodiscard]] SubsetFamily build_family(std::size_t p, std::size_t q, std::size_t d, const RngSpec& rng,
                                        std::span<const IndexSet> user_subsets = {});

/// Singleton family {1}, ..., {p}; pooling with it reproduces the raw columns.
[[nodiscard]] SubsetFamily singleton_family(std::size_t p);

struct IdentifiabilityReport {
    bool identifiable = false;
    std::size_t rank = 0;
    /// Integer-valued kernel vector with every cyclic q-window sum equal to 0,
    /// present only when not identifiable. First nonzero entry is positive.
    std::optional<std::vector<double>> witness;
};

/// Exact rank of the p x p circulant 0/1 window matrix over the rationals.
/// Throws TooLarge when p exceeds `max_p`.
[[nodiscard]] IdentifiabilityReport verify_identifiability(std::size_t p, std::size_t q,
                                                           std::size_t max_p = 64);

void to_json(nlohmann::json& j, const SubsetFamily& family);
[[nodiscard]] SubsetFamily family_from_json(const nlohmann::json& j);

}  // namespace poolmax
