#pragma once

#include "poolmax/matrix.hpp"
#include "poolmax/pooltest.hpp"
#include "poolmax/result.hpp"
#include "poolmax/subsets.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace poolmax::backtest {

/// Target exceedance probability per asset. A single value applies to all.
class ThetaTargets {
public:
    ThetaTargets(double common);  // NOLINT(google-explicit-constructor)
    explicit ThetaTargets(std::vector<double> per_asset);

    /// Target for column j (0-based); throws ShapeMismatch if the per-asset
    /// vector does not cover p columns.
    [[nodiscard]] double at(std::size_t j) const noexcept;
    void check(std::size_t p) const;

private:
    std::vector<double> values_;
};

[[nodiscard]] double logistic(double x) noexcept;

/// Increasing transform used inside the scoring function.
using ScoreTransform = std::function<double(double)>;

/// S(r, x, theta) = (1 - theta - 1{x > r}) G(r) + 1{x > r} G(x).
/// d/dr E[S] = (F(r) - theta) G'(r), so the expected score is minimised at the
/// theta-quantile of x.
[[nodiscard]] double score(double r, double x, double theta, const ScoreTransform& g = logistic);

/// The score applied to a VaR forecast at exceedance probability theta0:
/// score(r, x, 1 - theta0). Minimised in expectation by the true
/// (1 - theta0)-quantile.
[[nodiscard]] double var_score(double r, double x, double theta0, const ScoreTransform& g = logistic);

/// X = 1{U > R} - theta0 (ties are not exceedances). R may contain +inf.
[[nodiscard]] DataMatrix exceedance_matrix(const DataMatrix& u, const Matrix& r, const ThetaTargets& theta0);

/// Pooled max test on the exceedance matrix (two-sided).
[[nodiscard]] TestResult validation_test(const DataMatrix& u, const Matrix& r, const ThetaTargets& theta0,
                                         const SubsetFamily& fam, double alpha, const BootstrapConfig& cfg);

/// X = var_score(R, U, theta0) - var_score(R*, U, theta0), entrywise.
[[nodiscard]] DataMatrix score_diff_matrix(const DataMatrix& u, const Matrix& r, const Matrix& r_star,
                                           const ThetaTargets& theta0, const ScoreTransform& g = logistic);

enum class ComparativeSide {
    /// Equal predictive accuracy; max |T| on score_diff_matrix(u, r, r_star).
    TwoSided,
    /// Null: r_star (the "column" method) performs at least as well as r (the
    /// "row" method). Signed max on score_diff_matrix(u, r_star, r), so large
    /// values mean r scores lower, i.e. is better.
    OneSidedColumnBetter,
};

[[nodiscard]] TestResult comparative_test(const DataMatrix& u, const Matrix& r, const Matrix& r_star,
                                          const ThetaTargets& theta0, const SubsetFamily& fam, double alpha,
                                          const BootstrapConfig& cfg, ComparativeSide side,
                                          const ScoreTransform& g = logistic);

/// Empirical upper tail dependence: lambda(a, b) = #{i : both columns in their
/// upper-u tail} / (n u), where column j is in its tail when its empirical
/// CDF (max rank on ties, divided by n) exceeds 1 - u.
/// Throws BadThreshold unless 0 < u < 0.5 and n u >= 1.
[[nodiscard]] Matrix tail_dependence(const DataMatrix& zhat, double u);

struct NamedForecast {
    std::string name;
    Matrix values;
};

/// One report cell: a test result, or the error that made it undefined.
struct BacktestCell {
    std::optional<TestResult> result;
    std::string error;

    [[nodiscard]] bool ok() const noexcept { return result.has_value(); }
};

struct BacktestReport {
    std::vector<std::string> method_names;
    std::vector<BacktestCell> validation;
    /// comparative[i][j] for j < i: null "method j performs better than
    /// method i". Rows are indexed by i; row i holds i entries.
    std::vector<std::vector<BacktestCell>> comparative;
    std::size_t q = 0;
    std::size_t d = 0;
    double alpha = 0.05;
    std::size_t replicates = 0;
    double theta0 = 0.01;
};

/// Validation test per method and one-sided comparative test per ordered
/// pair (row i, column j < i). A degenerate cell is reported in place.
/// Cells use independent bootstrap substreams of cfg.rng and run in parallel
/// on cfg.threads workers.
[[nodiscard]] BacktestReport full_backtest(const DataMatrix& u, std::span<const NamedForecast> forecasts,
                                           double theta0, const SubsetFamily& fam, double alpha,
                                           const BootstrapConfig& cfg);

void to_json(nlohmann::json& j, const BacktestReport& report);

/// Table layout: header ",name1,name2,...", then one row per method with the
/// validation p-value on the diagonal and comparative p-values below it.
void write_report_csv(std::ostream& out, const BacktestReport& report);

/// Heatmap-ready matrix: "asset[,sector],name1,...". When sectors are given
/// (one per column), assets are grouped by sector in order of first appearance.
void write_tail_dependence_csv(std::ostream& out, const std::vector<std::string>& names, const Matrix& lambda,
                               const std::vector<std::string>* sectors = nullptr);

}  // namespace poolmax::backtest
