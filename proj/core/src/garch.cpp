#include "poolmax/garch.hpp"

#include "bfgs.hpp"
#include "poolmax/error.hpp"
#include "poolmax/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace poolmax {

namespace {

constexpr double kMaxAbsA1 = 0.99;
constexpr double kNuLow = 2.1;
constexpr double kNuHigh = 100.0;
constexpr double kLogGammaBound = 1.6;  // gamma in (e^-1.6, e^1.6)

double logistic(double u) noexcept { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

// Maps between the constrained parameters and an unconstrained vector.
// `scale` is the sample standard deviation, so that a0 and b0 are O(1).
struct Reparam {
    double scale;

    GarchParams decode(const Eigen::VectorXd& u) const {
        GarchParams p;
        p.a0 = u(0) * scale;
        p.a1 = kMaxAbsA1 * std::tanh(u(1));
        p.b0 = std::exp(u(2)) * scale * scale;
        const double e1 = std::exp(u(3));
        const double e2 = std::exp(u(4));
        const double denom = 1.0 + e1 + e2;
        p.b1 = e1 / denom;
        p.b2 = e2 / denom;
        p.innovation.nu = kNuLow + (kNuHigh - kNuLow) * logistic(u(5));
        p.innovation.gamma = std::exp(kLogGammaBound * std::tanh(u(6)));
        return p;
    }

    Eigen::VectorXd encode(const GarchParams& p) const {
        const auto clamp_open = [](double v, double lo, double hi) {
            const double eps = 1e-9 * (hi - lo);
            return std::clamp(v, lo + eps, hi - eps);
        };
        Eigen::VectorXd u(7);
        u(0) = p.a0 / scale;
        u(1) = std::atanh(clamp_open(p.a1, -kMaxAbsA1, kMaxAbsA1) / kMaxAbsA1);
        u(2) = std::log(std::max(p.b0, 1e-300) / (scale * scale));
        const double b1 = std::max(p.b1, 1e-8);
        const double b2 = std::max(p.b2, 1e-8);
        const double rest = std::max(1.0 - b1 - b2, 1e-8);
        u(3) = std::log(b1 / rest);
        u(4) = std::log(b2 / rest);
        u(5) = logit((clamp_open(p.innovation.nu, kNuLow, kNuHigh) - kNuLow) / (kNuHigh - kNuLow));
        u(6) = std::atanh(clamp_open(std::log(p.innovation.gamma), -kLogGammaBound, kLogGammaBound) / kLogGammaBound);
        return u;
    }
};

GarchParams default_start(std::span<const double> series) {
    const double mean = stats::mean(series);
    const double var = stats::variance_n(series);
    double acf1 = 0.0;
    for (std::size_t t = 1; t < series.size(); ++t) acf1 += (series[t] - mean) * (series[t - 1] - mean);
    acf1 /= static_cast<double>(series.size()) * var;
    GarchParams p;
    p.a1 = std::clamp(acf1, -0.5, 0.5);
    p.a0 = mean * (1.0 - p.a1);
    p.b1 = 0.05;
    p.b2 = 0.90;
    p.b0 = var * (1.0 - p.b1 - p.b2);
    p.innovation = {8.0, 1.0};
    return p;
}

// Negative mean log-likelihood, +inf where the recursion breaks down.
double objective(std::span<const double> series, const GarchParams& p) {
    const double ll = garch_log_likelihood(series, p);
    return std::isfinite(ll) ? -ll / static_cast<double>(series.size()) : std::numeric_limits<double>::infinity();
}

}  // namespace

void validate(const GarchParams& p) {
    const bool ok = std::isfinite(p.a0) && std::isfinite(p.a1) && std::abs(p.a1) < 1.0 && p.b0 > 0.0 &&
                    std::isfinite(p.b0) && p.b1 >= 0.0 && p.b2 >= 0.0 && p.b1 + p.b2 < 1.0;
    if (!ok) {
        fail(ErrorKind::BadParams, "GARCH parameters violate b0 > 0, b1, b2 >= 0, b1 + b2 < 1, |a1| < 1");
    }
    validate(p.innovation);
}

FilteredSeries garch_filter(std::span<const double> series, const GarchParams& p) {
    validate(p);
    const std::size_t n = series.size();
    FilteredSeries out;
    out.cond_mean.resize(n);
    out.cond_vol.resize(n);
    out.residuals.resize(n);
    if (n == 0) return out;

    double var = p.b0 / (1.0 - p.b1 - p.b2);
    double mu = p.a0 / (1.0 - p.a1);
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) {
            const double prev_var = out.cond_vol[t - 1] * out.cond_vol[t - 1];
            const double z_prev = out.residuals[t - 1];
            var = p.b0 + p.b1 * prev_var * z_prev * z_prev + p.b2 * prev_var;
            mu = p.a0 + p.a1 * series[t - 1];
        }
        const double vol = std::sqrt(var);
        out.cond_mean[t] = mu;
        out.cond_vol[t] = vol;
        out.residuals[t] = (series[t] - mu) / vol;
    }
    return out;
}

double garch_log_likelihood(std::span<const double> series, const GarchParams& p) {
    validate(p);
    const SkewTDensity density(p.innovation);
    double var = p.b0 / (1.0 - p.b1 - p.b2);
    double mu = p.a0 / (1.0 - p.a1);
    double eps_prev = 0.0;
    double ll = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        if (t > 0) {
            var = p.b0 + p.b1 * eps_prev * eps_prev + p.b2 * var;
            mu = p.a0 + p.a1 * series[t - 1];
        }
        if (!(var > 0.0) || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
        const double vol = std::sqrt(var);
        eps_prev = series[t] - mu;
        ll += density.log_pdf(eps_prev / vol) - std::log(vol);
    }
    return ll;
}

GarchFit garch_fit(std::span<const double> series, const std::optional<GarchParams>& init,
                   const GarchFitOptions& options) {
    if (series.size() < options.min_length) {
        fail(ErrorKind::TooFewObservations, "GARCH fit needs at least " + std::to_string(options.min_length) +
                                                " observations, got " + std::to_string(series.size()));
    }
    for (double v : series) {
        if (!std::isfinite(v)) fail(ErrorKind::NonFinite, "GARCH input series contains a non-finite value");
    }
    const double var = stats::variance_n(series);
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    if (*lo == *hi || !(var > 0.0)) fail(ErrorKind::DegenerateSeries, "GARCH input series is constant");

    const Reparam reparam{std::sqrt(var)};
    auto f = [&](const Eigen::VectorXd& u) {
        const GarchParams p = reparam.decode(u);
        if (!(p.b1 + p.b2 < 1.0) || !(p.b0 > 0.0) || !std::isfinite(p.b0)) return std::numeric_limits<double>::infinity();
        return objective(series, p);
    };

    const GarchParams start = init.value_or(default_start(series));
    Eigen::VectorXd u0 = reparam.encode(start);
    if (!std::isfinite(f(u0))) u0 = reparam.encode(default_start(series));

    detail::BfgsOptions bfgs;
    bfgs.max_iterations = options.max_iterations;

    PhiloxEngine jitter(options.rng);
    detail::BfgsResult best;
    std::size_t total_iterations = 0;
    for (std::size_t attempt = 0; attempt <= options.restarts; ++attempt) {
        Eigen::VectorXd u = u0;
        if (attempt > 0) {
            for (Eigen::Index i = 0; i < u.size(); ++i) u(i) += 0.5 * jitter.normal();
        }
        detail::BfgsResult r = detail::minimize_bfgs(f, u, bfgs);
        total_iterations += r.iterations;
        if (r.converged) {
            best = r;
            break;
        }
        if (best.x.size() == 0 || r.value < best.value) best = r;
    }
    if (!best.converged) {
        fail(ErrorKind::NonConvergence, "GARCH likelihood optimisation did not converge in " +
                                            std::to_string(options.max_iterations) + " iterations (" +
                                            std::to_string(options.restarts) + " restarts)");
    }

    GarchFit fit;
    fit.params = reparam.decode(best.x);
    fit.loglik = garch_log_likelihood(series, fit.params);
    FilteredSeries filtered = garch_filter(series, fit.params);
    fit.residuals = std::move(filtered.residuals);
    fit.cond_mean = std::move(filtered.cond_mean);
    fit.cond_vol = std::move(filtered.cond_vol);
    fit.iterations = total_iterations;
    return fit;
}

NextStep garch_next(std::span<const double> series, const GarchParams& p, const FilteredSeries& filtered) {
    validate(p);
    if (series.empty()) return {p.a0 / (1.0 - p.a1), std::sqrt(p.b0 / (1.0 - p.b1 - p.b2))};
    const std::size_t last = series.size() - 1;
    const double prev_var = filtered.cond_vol[last] * filtered.cond_vol[last];
    const double z = filtered.residuals[last];
    const double var = p.b0 + p.b1 * prev_var * z * z + p.b2 * prev_var;
    return {p.a0 + p.a1 * series[last], std::sqrt(var)};
}

std::vector<double> simulate_garch(const GarchParams& p, std::size_t n, const RngSpec& rng, bool gaussian_innovations,
                                   std::size_t burn_in) {
    validate(p);
    PhiloxEngine engine(rng);
    std::vector<double> out;
    out.reserve(n);
    double var = p.b0 / (1.0 - p.b1 - p.b2);
    double x_prev = p.a0 / (1.0 - p.a1);
    double z_prev = 0.0;
    bool first = true;
    for (std::size_t t = 0; t < n + burn_in; ++t) {
        if (!first) var = p.b0 + p.b1 * var * z_prev * z_prev + p.b2 * var;
        first = false;
        const double z = gaussian_innovations ? engine.normal() : skewt_from_uniform(engine.uniform(), p.innovation);
        const double x = p.a0 + p.a1 * x_prev + std::sqrt(var) * z;
        if (t >= burn_in) out.push_back(x);
        x_prev = x;
        z_prev = z;
    }
    return out;
}

}  // namespace poolmax
