#include "poolmax/backtest.hpp"

#include "poolmax/error.hpp"
#include "poolmax/io.hpp"
#include "poolmax/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

namespace poolmax::backtest {

namespace {

void check_theta(double theta) {
    if (!(theta > 0.0 && theta < 1.0)) {
        fail(ErrorKind::BadTheta, "theta0 must lie in (0,1), got " + std::to_string(theta));
    }
}

std::string shape(std::size_t rows, std::size_t cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

// Forecasts may be +inf ("never exceeded") but not NaN or -inf.
void check_forecast(const DataMatrix& u, const Matrix& r, const char* what) {
    if (static_cast<std::size_t>(r.rows()) != u.rows() || static_cast<std::size_t>(r.cols()) != u.cols()) {
        fail(ErrorKind::ShapeMismatch, std::string(what) + " is " + shape(r.rows(), r.cols()) +
                                           " but the returns panel is " + shape(u.rows(), u.cols()));
    }
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
            const double v = r(i, j);
            if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
                throw CellError(ErrorKind::NonFinite,
                                std::string(what) + " has an invalid value at row " + std::to_string(i + 1) +
                                    ", column " + std::to_string(j + 1),
                                static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            }
        }
    }
}

BacktestCell run_cell(const auto& fn) {
    BacktestCell cell;
    try {
        cell.result = fn();
    } catch (const DegenerateVarianceError& e) {
        cell.error = e.what();
    }
    return cell;
}

void cell_to_json(nlohmann::json& j, const BacktestCell& cell) {
    if (cell.ok()) {
        j = *cell.result;
    } else {
        j = nlohmann::json{{"error", "DegenerateVariance"}, {"message", cell.error}};
    }
}

std::string cell_text(const BacktestCell& cell) {
    return cell.ok() ? io::format_number(cell.result->p_value) : std::string("DegenerateVariance");
}

}  // namespace

ThetaTargets::ThetaTargets(double common) : values_{common} { check_theta(common); }

ThetaTargets::ThetaTargets(std::vector<double> per_asset) : values_(std::move(per_asset)) {
    if (values_.empty()) fail(ErrorKind::ShapeMismatch, "per-asset theta0 vector is empty");
    for (double t : values_) check_theta(t);
}

double ThetaTargets::at(std::size_t j) const noexcept { return values_.size() == 1 ? values_[0] : values_[j]; }

void ThetaTargets::check(std::size_t p) const {
    if (values_.size() != 1 && values_.size() != p) {
        fail(ErrorKind::ShapeMismatch, "theta0 has " + std::to_string(values_.size()) + " entries for " +
                                           std::to_string(p) + " assets");
    }
}

double logistic(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

double score(double r, double x, double theta, const ScoreTransform& g) {
    const double hit = x > r ? 1.0 : 0.0;
    // With r = +inf the first term is (1 - theta) G(inf), finite for bounded G.
    const double gr = g(r);
    return (1.0 - theta - hit) * gr + (hit > 0.0 ? g(x) : 0.0);
}

double var_score(double r, double x, double theta0, const ScoreTransform& g) {
    return score(r, x, 1.0 - theta0, g);
}

DataMatrix exceedance_matrix(const DataMatrix& u, const Matrix& r, const ThetaTargets& theta0) {
    check_forecast(u, r, "forecast panel");
    theta0.check(u.cols());
    Matrix x(u.rows(), u.cols());
    for (std::size_t i = 0; i < u.rows(); ++i) {
        for (std::size_t j = 0; j < u.cols(); ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            x(ii, jj) = (u(i, j) > r(ii, jj) ? 1.0 : 0.0) - theta0.at(j);
        }
    }
    return DataMatrix(std::move(x));
}

TestResult validation_test(const DataMatrix& u, const Matrix& r, const ThetaTargets& theta0, const SubsetFamily& fam,
                           double alpha, const BootstrapConfig& cfg) {
    return pool_test(exceedance_matrix(u, r, theta0), fam, alpha, cfg, Sidedness::TwoSided);
}

DataMatrix score_diff_matrix(const DataMatrix& u, const Matrix& r, const Matrix& r_star, const ThetaTargets& theta0,
                             const ScoreTransform& g) {
    check_forecast(u, r, "first forecast panel");
    check_forecast(u, r_star, "second forecast panel");
    theta0.check(u.cols());
    Matrix x(u.rows(), u.cols());
    for (std::size_t i = 0; i < u.rows(); ++i) {
        for (std::size_t j = 0; j < u.cols(); ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            const double t = theta0.at(j);
            x(ii, jj) = var_score(r(ii, jj), u(i, j), t, g) - var_score(r_star(ii, jj), u(i, j), t, g);
        }
    }
    return DataMatrix(std::move(x));
}

TestResult comparative_test(const DataMatrix& u, const Matrix& r, const Matrix& r_star, const ThetaTargets& theta0,
                            const SubsetFamily& fam, double alpha, const BootstrapConfig& cfg, ComparativeSide side,
                            const ScoreTransform& g) {
    if (side == ComparativeSide::TwoSided) {
        return pool_test(score_diff_matrix(u, r, r_star, theta0, g), fam, alpha, cfg, Sidedness::TwoSided);
    }
    return pool_test(score_diff_matrix(u, r_star, r, theta0, g), fam, alpha, cfg, Sidedness::Upper);
}

Matrix tail_dependence(const DataMatrix& zhat, double u) {
    const std::size_t n = zhat.rows();
    const std::size_t p = zhat.cols();
    const double nu = static_cast<double>(n) * u;
    if (!(u > 0.0 && u < 0.5) || nu < 1.0) {
        fail(ErrorKind::BadThreshold,
             "tail threshold u must satisfy 0 < u < 0.5 and n*u >= 1, got u=" + io::format_number(u) +
                 " with n=" + std::to_string(n));
    }

    // in_tail(i, j): F_hat_j(z_ij) > 1 - u, where F_hat = (# <= z) / n; the
    // comparison is done as n - rank < n u to stay in counts.
    std::vector<std::vector<char>> in_tail(p, std::vector<char>(n, 0));
    std::vector<double> column(n);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) column[i] = zhat(i, j);
        std::vector<double> sorted = column;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i) {
            const auto rank = static_cast<std::size_t>(
                std::upper_bound(sorted.begin(), sorted.end(), column[i]) - sorted.begin());
            in_tail[j][i] = static_cast<double>(n - rank) < nu ? 1 : 0;
        }
    }

    Matrix lambda(p, p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) {
            std::size_t joint = 0;
            for (std::size_t i = 0; i < n; ++i) joint += static_cast<std::size_t>(in_tail[a][i] & in_tail[b][i]);
            const double value = static_cast<double>(joint) / nu;
            lambda(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = value;
            lambda(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = value;
        }
    }
    return lambda;
}

BacktestReport full_backtest(const DataMatrix& u, std::span<const NamedForecast> forecasts, double theta0,
                             const SubsetFamily& fam, double alpha, const BootstrapConfig& cfg) {
    if (forecasts.empty()) fail(ErrorKind::Usage, "backtest needs at least one forecast panel");
    const ThetaTargets targets(theta0);
    for (const auto& f : forecasts) check_forecast(u, f.values, ("forecast panel '" + f.name + "'").c_str());

    const std::size_t k = forecasts.size();
    BacktestReport report;
    report.q = fam.q();
    report.d = fam.d();
    report.alpha = alpha;
    report.replicates = cfg.replicates;
    report.theta0 = theta0;
    for (const auto& f : forecasts) report.method_names.push_back(f.name);

    // Cells in row-major lower-triangle order (i, j <= i); cell c uses
    // bootstrap substream c so results do not depend on scheduling.
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j <= i; ++j) cells.emplace_back(i, j);
    }
    std::vector<BacktestCell> out(cells.size());
    parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
        BootstrapConfig cell_cfg = cfg;
        cell_cfg.rng = substream(cfg.rng, c);
        cell_cfg.threads = 1;
        const auto [i, j] = cells[c];
        if (i == j) {
            out[c] = run_cell([&] { return validation_test(u, forecasts[i].values, targets, fam, alpha, cell_cfg); });
        } else {
            out[c] = run_cell([&] {
                return comparative_test(u, forecasts[i].values, forecasts[j].values, targets, fam, alpha, cell_cfg,
                                        ComparativeSide::OneSidedColumnBetter);
            });
        }
    });

    report.validation.resize(k);
    report.comparative.resize(k);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto [i, j] = cells[c];
        if (i == j) {
            report.validation[i] = std::move(out[c]);
        } else {
            report.comparative[i].push_back(std::move(out[c]));
        }
    }
    return report;
}

void to_json(nlohmann::json& j, const BacktestReport& report) {
    nlohmann::json validation = nlohmann::json::array();
    for (std::size_t i = 0; i < report.method_names.size(); ++i) {
        nlohmann::json cell;
        cell_to_json(cell, report.validation[i]);
        validation.push_back({{"method", report.method_names[i]}, {"result", cell}});
    }
    nlohmann::json comparative = nlohmann::json::array();
    for (std::size_t i = 0; i < report.comparative.size(); ++i) {
        for (std::size_t c = 0; c < report.comparative[i].size(); ++c) {
            nlohmann::json cell;
            cell_to_json(cell, report.comparative[i][c]);
            comparative.push_back({{"row", report.method_names[i]},
                                   {"column", report.method_names[c]},
                                   {"null", "column performs better than row"},
                                   {"result", cell}});
        }
    }
    j = nlohmann::json{{"config",
                        {{"q", report.q},
                         {"d", report.d},
                         {"alpha", report.alpha},
                         {"replicates", report.replicates},
                         {"theta0", report.theta0}}},
                       {"methods", report.method_names},
                       {"validation", validation},
                       {"comparative", comparative}};
}

void write_report_csv(std::ostream& out, const BacktestReport& report) {
    const std::size_t k = report.method_names.size();
    for (const auto& name : report.method_names) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < k; ++i) {
        out << report.method_names[i];
        for (std::size_t j = 0; j < k; ++j) {
            out << ',';
            if (j < i) out << cell_text(report.comparative[i][j]);
            if (j == i) out << cell_text(report.validation[i]);
        }
        out << '\n';
    }
}

void write_tail_dependence_csv(std::ostream& out, const std::vector<std::string>& names, const Matrix& lambda,
                               const std::vector<std::string>* sectors) {
    const std::size_t p = names.size();
    if (static_cast<std::size_t>(lambda.rows()) != p || static_cast<std::size_t>(lambda.cols()) != p) {
        fail(ErrorKind::ShapeMismatch, "tail-dependence matrix does not match " + std::to_string(p) + " names");
    }
    if (sectors && sectors->size() != p) {
        fail(ErrorKind::ShapeMismatch,
             "sector file lists " + std::to_string(sectors->size()) + " assets, expected " + std::to_string(p));
    }

    std::vector<std::size_t> order(p);
    for (std::size_t j = 0; j < p; ++j) order[j] = j;
    if (sectors) {
        std::vector<std::string> seen;
        std::vector<std::size_t> group(p);
        for (std::size_t j = 0; j < p; ++j) {
            auto it = std::find(seen.begin(), seen.end(), (*sectors)[j]);
            if (it == seen.end()) it = seen.insert(seen.end(), (*sectors)[j]);
            group[j] = static_cast<std::size_t>(it - seen.begin());
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return group[a] < group[b]; });
    }

    out << "asset";
    if (sectors) out << ",sector";
    for (std::size_t b : order) out << ',' << names[b];
    out << '\n';
    for (std::size_t a : order) {
        out << names[a];
        if (sectors) out << ',' << (*sectors)[a];
        for (std::size_t b : order) {
            out << ',' << io::format_number(lambda(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        }
        out << '\n';
    }
}

}  // namespace poolmax::backtest
