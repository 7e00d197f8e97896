#include "poolmax/pooltest.hpp"

#include "poolmax/error.hpp"
#include "poolmax/parallel.hpp"
#include "poolmax/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace poolmax {

namespace {

// Replicates per GEMM block. Fixed so that the floating-point summation order,
// and therefore every draw, is independent of the worker count.
constexpr std::size_t kBootstrapBlock = 64;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        fail(ErrorKind::OutOfRange, "alpha must lie in (0,1), got " + std::to_string(alpha));
    }
}

void check_config(const BootstrapConfig& cfg) {
    if (cfg.replicates < 1) fail(ErrorKind::BadParams, "bootstrap needs at least one replicate");
}

void check_panel(const PooledPanel& panel) {
    for (Eigen::Index l = 0; l < panel.sigma_hat.size(); ++l) {
        if (!(panel.sigma_hat(l) > 0.0)) {
            throw DegenerateVarianceError("pooled subset " + std::to_string(l + 1) + " has zero variance",
                                          static_cast<std::size_t>(l));
        }
    }
}

// sqrt(n * sigma_hat(l)) for every subset.
Vector scale_denominators(const PooledPanel& panel) {
    const double n = static_cast<double>(panel.n());
    Vector denom(panel.sigma_hat.size());
    for (Eigen::Index l = 0; l < denom.size(); ++l) denom(l) = std::sqrt(n * panel.sigma_hat(l));
    return denom;
}

TestResult bootstrap_decision(const PooledPanel& panel, double alpha, const BootstrapConfig& cfg, Sidedness sided,
                              MethodTag tag) {
    check_alpha(alpha);
    check_config(cfg);
    check_panel(panel);
    TestResult result;
    result.method_tag = tag;
    result.alpha = alpha;
    result.statistic = max_statistic(panel, sided);
    const auto draws = multiplier_bootstrap(panel, cfg, sided);
    result.critical_value = bootstrap_quantile(draws, alpha);
    result.p_value = bootstrap_p_value(draws, result.statistic);
    result.reject = result.statistic > result.critical_value;
    result.per_subset_t = std::vector<double>(panel.t_stats.data(), panel.t_stats.data() + panel.t_stats.size());
    return result;
}

}  // namespace

PooledPanel pooled_panel(const DataMatrix& x, const SubsetFamily& fam) {
    if (fam.p() != x.cols()) {
        fail(ErrorKind::DimensionMismatch, "subset family is over p=" + std::to_string(fam.p()) +
                                               " columns but the data has " + std::to_string(x.cols()));
    }
    const std::size_t n = x.rows();
    const std::size_t d = fam.d();
    const Matrix& v = x.values();

    PooledPanel panel;
    panel.y.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = v.row(static_cast<Eigen::Index>(i));
        for (std::size_t l = 0; l < d; ++l) {
            const IndexSet& s = fam[l];
            double acc = row(static_cast<Eigen::Index>(s[0] - 1));
            for (std::size_t k = 1; k < s.size(); ++k) acc += row(static_cast<Eigen::Index>(s[k] - 1));
            panel.y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = acc;
        }
    }

    panel.sigma_hat.resize(static_cast<Eigen::Index>(d));
    panel.t_stats.resize(static_cast<Eigen::Index>(d));
    const double nd = static_cast<double>(n);
    for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(d); ++l) {
        const auto col = panel.y.col(l);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < col.size(); ++i) sum += col(i);
        const double mean = sum / nd;
        double ss = 0.0;
        for (Eigen::Index i = 0; i < col.size(); ++i) ss += (col(i) - mean) * (col(i) - mean);
        // A constant column can leave a rounding residue in ss; treat it as zero.
        const bool constant = col.maxCoeff() == col.minCoeff();
        panel.sigma_hat(l) = constant ? 0.0 : ss / nd;
        if (!(panel.sigma_hat(l) > 0.0)) {
            throw DegenerateVarianceError("pooled subset " + std::to_string(l + 1) + " has zero variance",
                                          static_cast<std::size_t>(l));
        }
        panel.t_stats(l) = sum / std::sqrt(nd * panel.sigma_hat(l));
    }
    return panel;
}

double max_statistic(const PooledPanel& panel, Sidedness sided) {
    check_panel(panel);
    if (panel.t_stats.size() == 0) fail(ErrorKind::EmptyDraws, "panel has no subsets");
    return sided == Sidedness::TwoSided ? panel.t_stats.cwiseAbs().maxCoeff() : panel.t_stats.maxCoeff();
}

Matrix bootstrap_t_vectors(const PooledPanel& panel, const BootstrapConfig& cfg) {
    check_config(cfg);
    check_panel(panel);
    const auto n = static_cast<Eigen::Index>(panel.n());
    const auto d = static_cast<Eigen::Index>(panel.d());
    const Vector denom = scale_denominators(panel);
    Matrix scaled = panel.y;
    for (Eigen::Index l = 0; l < d; ++l) scaled.col(l) /= denom(l);

    const std::size_t replicates = cfg.replicates;
    const std::size_t blocks = (replicates + kBootstrapBlock - 1) / kBootstrapBlock;
    Matrix out(static_cast<Eigen::Index>(replicates), d);

    parallel_for(blocks, cfg.threads, [&](std::size_t block) {
        const std::size_t first = block * kBootstrapBlock;
        Matrix xi(static_cast<Eigen::Index>(kBootstrapBlock), n);
        xi.setZero();
        const std::size_t count = std::min(kBootstrapBlock, replicates - first);
        for (std::size_t r = 0; r < count; ++r) {
            PhiloxEngine engine(substream(cfg.rng, first + r));
            for (Eigen::Index i = 0; i < n; ++i) xi(static_cast<Eigen::Index>(r), i) = engine.normal();
        }
        const Matrix tb = xi * scaled;
        out.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)) =
            tb.topRows(static_cast<Eigen::Index>(count));
    });
    return out;
}

std::vector<double> multiplier_bootstrap(const PooledPanel& panel, const BootstrapConfig& cfg, Sidedness sided) {
    const Matrix tb = bootstrap_t_vectors(panel, cfg);
    std::vector<double> draws(static_cast<std::size_t>(tb.rows()));
    for (Eigen::Index b = 0; b < tb.rows(); ++b) {
        draws[static_cast<std::size_t>(b)] =
            sided == Sidedness::TwoSided ? tb.row(b).cwiseAbs().maxCoeff() : tb.row(b).maxCoeff();
    }
    return draws;
}

double bootstrap_quantile(std::span<const double> draws, double alpha) {
    if (draws.empty()) fail(ErrorKind::EmptyDraws, "bootstrap quantile of an empty draw vector");
    check_alpha(alpha);
    const std::size_t b = draws.size();
    const std::size_t rank = std::min(stats::ceil_rank(1.0 - alpha, b + 1), b);
    return stats::order_statistic(draws, rank);
}

double bootstrap_p_value(std::span<const double> draws, double statistic) {
    if (draws.empty()) fail(ErrorKind::EmptyDraws, "bootstrap p-value of an empty draw vector");
    const auto exceed = std::count_if(draws.begin(), draws.end(), [&](double m) { return m >= statistic; });
    return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(draws.size()) + 1.0);
}

TestResult naive_test(const DataMatrix& x, double alpha) {
    check_alpha(alpha);
    const Matrix& v = x.values();
    const Vector row_sums = v.rowwise().sum();
    const double n = static_cast<double>(x.rows());
    const double sum = row_sums.sum();
    const double mean = sum / n;
    const double ss = (row_sums.array() - mean).square().sum();
    const bool constant = row_sums.maxCoeff() == row_sums.minCoeff();
    const double sigma = constant ? 0.0 : ss / n;
    if (!(sigma > 0.0)) throw DegenerateVarianceError("row sums are constant; naive statistic undefined", 0);

    TestResult result;
    result.method_tag = MethodTag::Naive;
    result.alpha = alpha;
    result.statistic = sum / std::sqrt(n * sigma);
    result.critical_value = stats::normal_quantile(1.0 - alpha / 2.0);
    result.p_value = std::erfc(std::abs(result.statistic) / std::sqrt(2.0));
    result.reject = std::abs(result.statistic) > result.critical_value;
    return result;
}

TestResult pool_test(const PooledPanel& panel, double alpha, const BootstrapConfig& cfg, Sidedness sided) {
    return bootstrap_decision(panel, alpha, cfg, sided, MethodTag::SubsetsPool);
}

TestResult pool_test(const DataMatrix& x, const SubsetFamily& fam, double alpha, const BootstrapConfig& cfg,
                     Sidedness sided) {
    check_alpha(alpha);
    check_config(cfg);
    return pool_test(pooled_panel(x, fam), alpha, cfg, sided);
}

TestResult marginal_test(const DataMatrix& x, double alpha, const BootstrapConfig& cfg) {
    check_alpha(alpha);
    check_config(cfg);
    const PooledPanel panel = pooled_panel(x, singleton_family(x.cols()));
    return bootstrap_decision(panel, alpha, cfg, Sidedness::TwoSided, MethodTag::Marginal);
}

}  // namespace poolmax
