#include "poolmax/var_estimators.hpp"

#include "poolmax/error.hpp"
#include "poolmax/stats.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace poolmax {

namespace {

constexpr double kMinShape = -0.5;

void check_theta(double theta) {
    if (!(theta > 0.0 && theta < 1.0)) {
        fail(ErrorKind::OutOfRange, "theta must lie in (0,1), got " + std::to_string(theta));
    }
}

// Profile log-likelihood of the GPD in tau = xi / beta; xi is then the mean
// of log(1 + tau y).
struct GpdProfile {
    std::span<const double> y;
    double y_mean;
    double y_max;

    struct Point {
        double loglik;
        double xi;
        double beta;
    };

    Point at(double tau) const {
        constexpr double kInvalid = -std::numeric_limits<double>::infinity();
        const double k = static_cast<double>(y.size());
        if (std::abs(tau) * y_max < 1e-10) return {-k * std::log(y_mean) - k, 0.0, y_mean};
        if (tau * y_max <= -1.0) return {kInvalid, 0.0, 0.0};
        double s = 0.0;
        for (double v : y) s += std::log1p(tau * v);
        const double xi = s / k;
        const double beta = xi / tau;
        if (!(beta > 0.0) || xi < kMinShape) return {kInvalid, xi, beta};
        return {-k * std::log(beta) - s - k, xi, beta};
    }

    // Newton steps on the profile score. Brent alone only locates the
    // maximiser to about sqrt(eps), which is visible in the quantile.
    double polish(double tau) const {
        for (int it = 0; it < 8 && std::abs(tau) * y_max >= 1e-10; ++it) {
            double s = 0.0, d1 = 0.0, d2 = 0.0;
            for (double v : y) {
                const double w = 1.0 + tau * v;
                s += std::log1p(tau * v);
                d1 += v / w;
                d2 -= v * v / (w * w);
            }
            const double k = static_cast<double>(y.size());
            const double xi = s / k, xi1 = d1 / k, xi2 = d2 / k;
            const double g = 1.0 / tau - xi1 * (1.0 / xi + 1.0);
            const double h = -1.0 / (tau * tau) - xi2 * (1.0 / xi + 1.0) + xi1 * xi1 / (xi * xi);
            if (!(h < 0.0) || !std::isfinite(g)) break;
            const double next = tau - g / h;
            if (!(at(next).loglik >= at(tau).loglik - 1e-12 * std::abs(at(tau).loglik))) break;
            if (next == tau) break;
            tau = next;
        }
        return tau;
    }
};

PotFit moment_fit(std::span<const double> y, PotFit fit) {
    const double mean = stats::mean(y);
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(y.size() - 1);
    if (!(var > 0.0) || !(mean > 0.0)) {
        fail(ErrorKind::GpdNonConvergence, "GPD fit failed: exceedances have no spread");
    }
    const double ratio = mean * mean / var;
    fit.xi = 0.5 * (1.0 - ratio);
    fit.beta = 0.5 * mean * (ratio + 1.0);
    fit.moment_fallback = true;
    return fit;
}

}  // namespace

double empirical_var(std::span<const double> residuals, double theta) {
    check_theta(theta);
    const std::size_t m = residuals.size();
    if (m == 0 || static_cast<double>(m) * theta < 1.0 - 1e-9) {
        fail(ErrorKind::TooFewObservations, "empirical VaR at theta=" + std::to_string(theta) + " needs at least " +
                                                std::to_string(static_cast<std::size_t>(std::ceil(1.0 / theta))) +
                                                " observations, got " + std::to_string(m));
    }
    return stats::order_statistic(residuals, stats::ceil_rank(1.0 - theta, m));
}

PotFit fit_pot(std::span<const double> residuals, std::size_t k) {
    const std::size_t m = residuals.size();
    if (k < 10 || k >= m) {
        fail(ErrorKind::TooFewExceedances,
             "POT needs 10 <= k < m, got k=" + std::to_string(k) + ", m=" + std::to_string(m));
    }
    std::vector<double> sorted(residuals.begin(), residuals.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    PotFit fit;
    fit.k = k;
    fit.m = m;
    fit.threshold = sorted[k];
    std::vector<double> y(k);
    for (std::size_t i = 0; i < k; ++i) y[i] = sorted[i] - fit.threshold;

    const GpdProfile profile{y, stats::mean(y), y.front()};
    if (!(profile.y_mean > 0.0)) fail(ErrorKind::GpdNonConvergence, "GPD fit failed: all exceedances are zero");

    // Coarse grid in tau, then Brent between the neighbours of the best point.
    std::vector<double> grid;
    for (int i = 99; i >= 1; i -= 2) grid.push_back(-static_cast<double>(i) / 100.0 / profile.y_max);
    grid.push_back(0.0);
    for (int e = 0; e <= 140; ++e) grid.push_back(std::pow(10.0, -4.0 + 0.05 * e) / profile.y_mean);

    std::size_t best = 0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ll = profile.at(grid[i]).loglik;
        if (ll > best_ll) {
            best_ll = ll;
            best = i;
        }
    }
    if (!std::isfinite(best_ll) || best == 0 || best + 1 == grid.size()) return moment_fit(y, fit);

    const auto negative = [&](double tau) {
        const double ll = profile.at(tau).loglik;
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
    };
    const auto [tau, neg_ll] = boost::math::tools::brent_find_minima(negative, grid[best - 1], grid[best + 1], 52);
    const auto point = profile.at(profile.polish(-neg_ll < best_ll ? grid[best] : tau));
    if (!std::isfinite(point.loglik) || !(point.beta > 0.0)) return moment_fit(y, fit);
    fit.xi = point.xi;
    fit.beta = point.beta;
    return fit;
}

double pot_quantile(const PotFit& fit, double theta) {
    check_theta(theta);
    const double ratio = static_cast<double>(fit.k) / (static_cast<double>(fit.m) * theta);
    if (std::abs(fit.xi) < 1e-10) return fit.threshold + fit.beta * std::log(ratio);
    return fit.threshold + fit.beta / fit.xi * (std::pow(ratio, fit.xi) - 1.0);
}

double evt_var(std::span<const double> residuals, double theta, std::size_t k) {
    check_theta(theta);
    return pot_quantile(fit_pot(residuals, k), theta);
}

std::string_view to_string(VarKind kind) noexcept {
    switch (kind) {
        case VarKind::Empirical: return "empirical";
        case VarKind::SkewT: return "sstd";
        case VarKind::EVT: return "evt";
    }
    return "empirical";
}

VarKind var_kind_from_string(std::string_view name) {
    if (name == "empirical" || name == "emp") return VarKind::Empirical;
    if (name == "sstd" || name == "skewt") return VarKind::SkewT;
    if (name == "evt") return VarKind::EVT;
    fail(ErrorKind::BadParams, "unknown VaR method '" + std::string(name) + "' (expected empirical, sstd or evt)");
}

double residual_var(const GarchFit& fit, const VarMethod& method, double theta) {
    check_theta(theta);
    switch (method.kind) {
        case VarKind::Empirical: return empirical_var(fit.residuals, theta);
        case VarKind::SkewT: return skewt_quantile(1.0 - theta, fit.params.innovation);
        case VarKind::EVT: return evt_var(fit.residuals, theta, method.k);
    }
    return 0.0;
}

VarForecast forecast_var(std::span<const double> window, const VarMethod& method, double theta,
                         const std::optional<GarchParams>& init, const GarchFitOptions& options) {
    check_theta(theta);
    const GarchFit fit = garch_fit(window, init, options);
    const NextStep next = garch_next(window, fit.params, FilteredSeries{fit.cond_mean, fit.cond_vol, fit.residuals});
    VarForecast out;
    out.params = fit.params;
    out.mean = next.mean;
    out.vol = next.vol;
    out.residual_var = residual_var(fit, method, theta);
    out.value = out.mean + out.vol * out.residual_var;
    return out;
}

std::vector<std::vector<double>> rolling_forecasts(std::span<const double> series, const RollingConfig& config,
                                                   std::span<const VarMethod> methods) {
    check_theta(config.theta);
    if (config.refit_every < 1) fail(ErrorKind::BadParams, "refit_every must be at least 1");
    if (series.size() < config.window + config.horizon) {
        fail(ErrorKind::InsufficientHistory, "rolling forecasts need " + std::to_string(config.window + config.horizon) +
                                                 " observations, got " + std::to_string(series.size()));
    }
    std::vector<std::vector<double>> out(methods.size(), std::vector<double>(config.horizon));
    const std::size_t start = series.size() - config.horizon;
    std::optional<GarchParams> last;
    for (std::size_t h = 0; h < config.horizon; ++h) {
        const auto window = series.subspan(start + h - config.window, config.window);
        GarchFit fit;
        if (!last || h % config.refit_every == 0) {
            fit = garch_fit(window, last, config.fit_options);
            last = fit.params;
        } else {
            FilteredSeries filtered = garch_filter(window, *last);
            fit.params = *last;
            fit.residuals = std::move(filtered.residuals);
            fit.cond_mean = std::move(filtered.cond_mean);
            fit.cond_vol = std::move(filtered.cond_vol);
        }
        const NextStep next =
            garch_next(window, fit.params, FilteredSeries{fit.cond_mean, fit.cond_vol, fit.residuals});
        for (std::size_t m = 0; m < methods.size(); ++m) {
            out[m][h] = next.mean + next.vol * residual_var(fit, methods[m], config.theta);
        }
    }
    return out;
}

std::vector<double> rolling_forecasts(std::span<const double> series, const RollingConfig& config,
                                      const VarMethod& method) {
    return std::move(rolling_forecasts(series, config, std::span<const VarMethod>(&method, 1)).front());
}

}  // namespace poolmax
