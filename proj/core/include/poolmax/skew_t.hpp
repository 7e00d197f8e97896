#pragma once

namespace poolmax {

/// Fernandez-Steel skewed Student-t, shifted and scaled to mean 0 and
/// variance 1. nu > 2 is the tail index; gamma > 0 the skewness (gamma = 1
/// is the symmetric standardised t, gamma > 1 skews to the right).
struct SkewTParams {
    double nu = 8.0;
    double gamma = 1.0;
};

/// Throws BadParams unless nu > 2 and gamma > 0 (both finite).
void validate(const SkewTParams& params);

[[nodiscard]] double skewt_log_pdf(double x, const SkewTParams& params);
[[nodiscard]] double skewt_pdf(double x, const SkewTParams& params);
[[nodiscard]] double skewt_cdf(double x, const SkewTParams& params);

/// Inverse of skewt_cdf. Splits at the mass 1/(1 + gamma^2) that the
/// unstandardised law puts below its mode, then inverts the matching half.
[[nodiscard]] double skewt_quantile(double prob, const SkewTParams& params);

/// Draw by inversion of a uniform on (0,1).
[[nodiscard]] double skewt_from_uniform(double u, const SkewTParams& params);

/// Precomputed constants for repeated density evaluation with fixed params.
class SkewTDensity {
public:
    explicit SkewTDensity(const SkewTParams& params);
    [[nodiscard]] double log_pdf(double x) const noexcept;

private:
    double nu_;
    double gamma_;
    double mu_;
    double sigma_;
    double log_norm_;   // log g + log sigma + log(t kernel constant) + log s
    double t_scale_;    // s = sqrt(nu / (nu - 2))
};

}  // namespace poolmax
