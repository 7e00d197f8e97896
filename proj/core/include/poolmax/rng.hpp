#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace poolmax {

/// Reproducibility token: a seed plus the id of an independent substream.
/// Copy it freely; engines are constructed from it on demand.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

/// Child stream number `k` of `rng`. Distinct k give distinct streams and the
/// same inputs always give the same output.
[[nodiscard]] RngSpec substream(const RngSpec& rng, std::uint64_t k) noexcept;

/// Philox4x32-10 counter-based generator. Keyed by the seed; the 128-bit
/// counter is (block index, stream id), so every (seed, stream) pair is an
/// independent sequence and no two threads ever share state.
class PhiloxEngine {
public:
    using result_type = std::uint64_t;

    explicit PhiloxEngine(const RngSpec& spec) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    double uniform() noexcept;

    /// Standard normal draw (Box-Muller; the paired value is cached).
    double normal() noexcept;

    /// Uniform integer in [0, bound) by rejection, bound >= 1.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_{};
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace poolmax
