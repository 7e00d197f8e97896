#pragma once

#include "poolmax/garch.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace poolmax {

/// ceil((1 - theta) m)-th order statistic of the residuals.
/// Throws TooFewObservations when m < 1/theta.
[[nodiscard]] double empirical_var(std::span<const double> residuals, double theta);

/// Peaks-over-threshold fit: threshold is the (k+1)-th largest observation and
/// a generalised Pareto law is fitted to the k exceedances above it.
struct PotFit {
    double threshold = 0.0;
    double xi = 0.0;    // shape
    double beta = 0.0;  // scale
    std::size_t k = 0;
    std::size_t m = 0;
    bool moment_fallback = false;
};

/// GPD by maximum likelihood (profile likelihood in xi/beta, refined with
/// Brent), falling back to the method of moments if the maximiser is not
/// interior. Errors: TooFewExceedances (k < 10 or k >= m),
/// GpdNonConvergence (no valid fit, e.g. all exceedances tied at the threshold).
[[nodiscard]] PotFit fit_pot(std::span<const double> residuals, std::size_t k);

/// u + (beta/xi) ((k/(m theta))^xi - 1), or u + beta log(k/(m theta)) as xi -> 0.
[[nodiscard]] double pot_quantile(const PotFit& fit, double theta);

[[nodiscard]] double evt_var(std::span<const double> residuals, double theta, std::size_t k = 50);

enum class VarKind { Empirical, SkewT, EVT };

[[nodiscard]] std::string_view to_string(VarKind kind) noexcept;
[[nodiscard]] VarKind var_kind_from_string(std::string_view name);

struct VarMethod {
    VarKind kind = VarKind::Empirical;
    std::size_t k = 50;  // EVT tail count
};

struct VarForecast {
    double value = 0.0;        // mu_next + vol_next * residual_var
    double mean = 0.0;
    double vol = 0.0;
    double residual_var = 0.0;
    GarchParams params;
};

/// Quantile of the innovations at level 1 - theta by the chosen method, using
/// the fitted skew-t parameters for SkewT and the residuals otherwise.
[[nodiscard]] double residual_var(const GarchFit& fit, const VarMethod& method, double theta);

/// Fits the AR-GARCH model on `window` and forecasts the next-step VaR.
[[nodiscard]] VarForecast forecast_var(std::span<const double> window, const VarMethod& method, double theta,
                                       const std::optional<GarchParams>& init = std::nullopt,
                                       const GarchFitOptions& options = {});

struct RollingConfig {
    std::size_t window = 3000;
    std::size_t horizon = 0;
    /// Refit the model every `refit_every` days; in between, the last
    /// parameters are re-filtered over the current window.
    std::size_t refit_every = 1;
    double theta = 0.01;
    GarchFitOptions fit_options{};
};

/// Forecasts for the last `horizon` observations of `series`, one vector per
/// method. Forecast h uses series[len - horizon + h - window, len - horizon + h).
/// Throws InsufficientHistory when len < window + horizon.
[[nodiscard]] std::vector<std::vector<double>> rolling_forecasts(std::span<const double> series,
                                                                 const RollingConfig& config,
                                                                 std::span<const VarMethod> methods);

[[nodiscard]] std::vector<double> rolling_forecasts(std::span<const double> series, const RollingConfig& config,
                                                    const VarMethod& method);

}  // namespace poolmax
