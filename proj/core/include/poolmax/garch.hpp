#pragma once

#include "poolmax/rng.hpp"
#include "poolmax/skew_t.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace poolmax {

/// AR(1)-GARCH(1,1) with standardised skew-t innovations:
///   x_t       = mu_t + sigma_t z_t
///   mu_t      = a0 + a1 x_{t-1}
///   sigma_t^2 = b0 + b1 sigma_{t-1}^2 z_{t-1}^2 + b2 sigma_{t-1}^2
struct GarchParams {
    double a0 = 0.0;
    double a1 = 0.0;
    double b0 = 1.0;
    double b1 = 0.0;
    double b2 = 0.0;
    SkewTParams innovation{};
};

/// Throws BadParams unless b0 > 0, b1 >= 0, b2 >= 0, b1 + b2 < 1, |a1| < 1
/// and the innovation parameters are valid.
void validate(const GarchParams& params);

struct FilteredSeries {
    std::vector<double> cond_mean;
    std::vector<double> cond_vol;
    std::vector<double> residuals;
};

/// Runs the recursion over `series`. The first step uses the unconditional
/// mean a0 / (1 - a1) and variance b0 / (1 - b1 - b2).
[[nodiscard]] FilteredSeries garch_filter(std::span<const double> series, const GarchParams& params);

/// Skew-t log-likelihood of `series` under `params`.
[[nodiscard]] double garch_log_likelihood(std::span<const double> series, const GarchParams& params);

struct GarchFit {
    GarchParams params;
    double loglik = 0.0;
    std::vector<double> residuals;
    std::vector<double> cond_mean;
    std::vector<double> cond_vol;
    std::size_t iterations = 0;
};

struct GarchFitOptions {
    std::size_t max_iterations = 500;
    /// Extra attempts from jittered starting points after a NonConvergence.
    std::size_t restarts = 5;
    RngSpec rng{0x5EEDull, 0};
    std::size_t min_length = 300;
};

/// Joint quasi-maximum-likelihood estimate of all seven parameters. The
/// constraints are enforced by reparameterisation and the objective is
/// minimised by BFGS with numerical gradients.
/// Errors: TooFewObservations, NonFinite, DegenerateSeries, NonConvergence.
[[nodiscard]] GarchFit garch_fit(std::span<const double> series, const std::optional<GarchParams>& init = std::nullopt,
                                 const GarchFitOptions& options = {});

struct NextStep {
    double mean = 0.0;
    double vol = 0.0;
};

/// One-step-ahead conditional mean and volatility after the last observation.
[[nodiscard]] NextStep garch_next(std::span<const double> series, const GarchParams& params,
                                  const FilteredSeries& filtered);

/// Simulated path of length n. A burn-in of `burn_in` steps starting from the
/// unconditional moments is discarded.
[[nodiscard]] std::vector<double> simulate_garch(const GarchParams& params, std::size_t n, const RngSpec& rng,
                                                 bool gaussian_innovations = false, std::size_t burn_in = 500);

}  // namespace poolmax
