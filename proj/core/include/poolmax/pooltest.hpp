#pragma once

#include "poolmax/matrix.hpp"
#include "poolmax/result.hpp"
#include "poolmax/rng.hpp"
#include "poolmax/subsets.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace poolmax {

/// Subset sums of a panel together with their per-subset studentisation.
///
/// y(i, l) is the sum of row i over subset l, sigma_hat(l) the mean-centred
/// variance of column l of y (divisor n), and
/// t_stats(l) = sum_i y(i, l) / sqrt(n * sigma_hat(l)).
/// Construction through pooled_panel() guarantees sigma_hat > 0 everywhere.
struct PooledPanel {
    Matrix y;
    Vector sigma_hat;
    Vector t_stats;

    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(y.rows()); }
    [[nodiscard]] std::size_t d() const noexcept { return static_cast<std::size_t>(y.cols()); }
};

struct BootstrapConfig {
    std::size_t replicates = 1000;
    RngSpec rng{};
    /// Worker threads for the replicate loop (0 = hardware concurrency).
    /// Draws do not depend on this value.
    unsigned threads = 1;
};

enum class Sidedness {
    TwoSided,  // max_l |T^(l)|
    Upper,     // max_l T^(l)
};

/// Throws DimensionMismatch when fam.p() != x.cols(), and
/// DegenerateVarianceError naming the first subset whose pooled sum is constant.
[[nodiscard]] PooledPanel pooled_panel(const DataMatrix& x, const SubsetFamily& fam);

[[nodiscard]] double max_statistic(const PooledPanel& panel, Sidedness sided = Sidedness::TwoSided);

/// B x d matrix whose row b is (T_B^(1), ..., T_B^(d)) for replicate b. The
/// multipliers of replicate b are i.i.d. N(0,1) from substream(cfg.rng, b) and
/// multiply the uncentred subset sums.
[[nodiscard]] Matrix bootstrap_t_vectors(const PooledPanel& panel, const BootstrapConfig& cfg);

/// The B bootstrap maxima M_B (absolute for TwoSided, signed for Upper).
[[nodiscard]] std::vector<double> multiplier_bootstrap(const PooledPanel& panel, const BootstrapConfig& cfg,
                                                       Sidedness sided = Sidedness::TwoSided);

/// The ceil((1 - alpha)(B + 1))-th order statistic of `draws`, clamped to the
/// largest draw.
[[nodiscard]] double bootstrap_quantile(std::span<const double> draws, double alpha);

/// (1 + #{draws >= statistic}) / (B + 1).
[[nodiscard]] double bootstrap_p_value(std::span<const double> draws, double statistic);

/// Normal-calibrated test on the full row sums; rejects when |T| > z_{1-alpha/2}.
[[nodiscard]] TestResult naive_test(const DataMatrix& x, double alpha);

/// Subsets-based max test with multiplier-bootstrap critical value.
[[nodiscard]] TestResult pool_test(const DataMatrix& x, const SubsetFamily& fam, double alpha,
                                   const BootstrapConfig& cfg, Sidedness sided = Sidedness::TwoSided);

/// Same pipeline as pool_test on an already pooled panel.
[[nodiscard]] TestResult pool_test(const PooledPanel& panel, double alpha, const BootstrapConfig& cfg,
                                   Sidedness sided = Sidedness::TwoSided);

/// Per-column max test without pooling. Identical to pool_test with the
/// singleton family, apart from the method tag.
[[nodiscard]] TestResult marginal_test(const DataMatrix& x, double alpha, const BootstrapConfig& cfg);

}  // namespace poolmax
