#include "poolmax/skew_t.hpp"

#include "poolmax/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace poolmax {

namespace {

// Mean-absolute value of the unit-variance t and the resulting location and
// scale of the skewed law.
struct Moments {
    double mu;
    double sigma;
};

double unit_t_abs_mean(double nu) {
    const double log_beta = std::lgamma(0.5) + std::lgamma(nu / 2.0) - std::lgamma((nu + 1.0) / 2.0);
    return 2.0 * std::sqrt(nu - 2.0) / (nu - 1.0) / std::exp(log_beta);
}

Moments moments(const SkewTParams& p) {
    const double m1 = unit_t_abs_mean(p.nu);
    const double g = p.gamma;
    const double mu = m1 * (g - 1.0 / g);
    const double var = (1.0 - m1 * m1) * (g * g + 1.0 / (g * g)) + 2.0 * m1 * m1 - 1.0;
    return {mu, std::sqrt(var)};
}

// CDF and quantile of the unit-variance Student t.
double unit_t_cdf(double z, double nu) {
    const double s = std::sqrt(nu / (nu - 2.0));
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu), z * s);
}

double unit_t_quantile(double prob, double nu) {
    const double s = std::sqrt(nu / (nu - 2.0));
    return boost::math::quantile(boost::math::students_t_distribution<double>(nu), prob) / s;
}

}  // namespace

void validate(const SkewTParams& params) {
    if (!(std::isfinite(params.nu) && params.nu > 2.0) || !(std::isfinite(params.gamma) && params.gamma > 0.0)) {
        fail(ErrorKind::BadParams, "skew-t needs nu > 2 and gamma > 0, got nu=" + std::to_string(params.nu) +
                                       ", gamma=" + std::to_string(params.gamma));
    }
}

SkewTDensity::SkewTDensity(const SkewTParams& params) : nu_(params.nu), gamma_(params.gamma) {
    validate(params);
    const Moments m = moments(params);
    mu_ = m.mu;
    sigma_ = m.sigma;
    t_scale_ = std::sqrt(nu_ / (nu_ - 2.0));
    const double log_t_const = std::lgamma((nu_ + 1.0) / 2.0) - std::lgamma(nu_ / 2.0) -
                               0.5 * std::log(nu_ * std::numbers::pi);
    const double log_g = std::log(2.0 / (gamma_ + 1.0 / gamma_));
    log_norm_ = log_g + std::log(sigma_) + log_t_const + std::log(t_scale_);
}

double SkewTDensity::log_pdf(double x) const noexcept {
    const double z = x * sigma_ + mu_;
    const double xi = z < 0.0 ? 1.0 / gamma_ : gamma_;
    const double u = z / xi * t_scale_;
    return log_norm_ - 0.5 * (nu_ + 1.0) * std::log1p(u * u / nu_);
}

double skewt_log_pdf(double x, const SkewTParams& params) {
    return SkewTDensity(params).log_pdf(x);
}

double skewt_pdf(double x, const SkewTParams& params) {
    return std::exp(skewt_log_pdf(x, params));
}

double skewt_cdf(double x, const SkewTParams& params) {
    validate(params);
    const Moments m = moments(params);
    const double g = params.gamma;
    const double norm = 2.0 / (g + 1.0 / g);
    const double z = x * m.sigma + m.mu;
    if (z < 0.0) return norm / g * unit_t_cdf(z * g, params.nu);
    return 1.0 - norm * g * unit_t_cdf(-z / g, params.nu);
}

double skewt_quantile(double prob, const SkewTParams& params) {
    validate(params);
    if (!(prob > 0.0 && prob < 1.0)) {
        fail(ErrorKind::OutOfRange, "skew-t quantile needs prob in (0,1), got " + std::to_string(prob));
    }
    const Moments m = moments(params);
    const double g = params.gamma;
    const double norm = 2.0 / (g + 1.0 / g);
    const double below_mode = 1.0 / (1.0 + g * g);
    double z;
    if (prob < below_mode) {
        z = unit_t_quantile(prob * g / norm, params.nu) / g;
    } else {
        const double tail = (1.0 - prob) / (norm * g);
        z = tail >= 0.5 ? 0.0 : -g * unit_t_quantile(tail, params.nu);
    }
    return (z - m.mu) / m.sigma;
}

double skewt_from_uniform(double u, const SkewTParams& params) {
    return skewt_quantile(u, params);
}

}  // namespace poolmax
