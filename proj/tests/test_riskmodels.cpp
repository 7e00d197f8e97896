#include "poolmax/error.hpp"
#include "poolmax/garch.hpp"
#include "poolmax/rng.hpp"
#include "poolmax/skew_t.hpp"
#include "poolmax/stats.hpp"
#include "poolmax/var_estimators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace poolmax;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Usage;
}

// Composite Simpson rule for the density on [lo, hi].
template <typename F>
double simpson(F f, double lo, double hi, int intervals = 20000) {
    const double h = (hi - lo) / intervals;
    double s = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<double> normal_series(std::size_t n, RngSpec rng) {
    PhiloxEngine e(rng);
    std::vector<double> v(n);
    for (double& x : v) x = e.normal();
    return v;
}

}  // namespace

TEST(SkewT, ParamValidation) {
    EXPECT_EQ(kind_of([] { (void)skewt_quantile(0.5, SkewTParams{2.0, 1.0}); }), ErrorKind::BadParams);
    EXPECT_EQ(kind_of([] { (void)skewt_quantile(0.5, SkewTParams{5.0, 0.0}); }), ErrorKind::BadParams);
    EXPECT_THROW((void)skewt_quantile(1.0, SkewTParams{5.0, 1.0}), Error);
}

TEST(SkewT, StandardisedMoments) {
    // Quadrature of the density: mass 1, mean 0, variance 1.
    for (const SkewTParams p : {SkewTParams{5, 1.5}, SkewTParams{10, 0.7}, SkewTParams{30, 1.0}}) {
        const auto pdf = [&](double x) { return skewt_pdf(x, p); };
        EXPECT_NEAR(simpson(pdf, -60, 60, 200000), 1.0, 2e-4);
        EXPECT_NEAR(simpson([&](double x) { return x * pdf(x); }, -60, 60, 200000), 0.0, 2e-3);
        EXPECT_NEAR(simpson([&](double x) { return x * x * pdf(x); }, -60, 60, 200000), 1.0, 1e-2);
    }
}

TEST(SkewT, CdfMatchesQuadrature) {
    for (const SkewTParams p : {SkewTParams{5, 2.0}, SkewTParams{3, 0.7}, SkewTParams{10, 1.0}}) {
        for (double x : {-3.0, -1.0, -0.2, 0.0, 0.4, 1.5, 3.0}) {
            const double oracle = simpson([&](double t) { return skewt_pdf(t, p); }, -400.0, x, 400000);
            EXPECT_NEAR(skewt_cdf(x, p), oracle, 5e-5) << p.nu << "," << p.gamma << "," << x;
        }
    }
}

TEST(SkewT, LogPdfAgreesWithDensityObject) {
    const SkewTParams p{6, 1.3};
    const SkewTDensity d(p);
    for (double x = -5; x <= 5; x += 0.37) {
        EXPECT_NEAR(d.log_pdf(x), skewt_log_pdf(x, p), 1e-12);
        EXPECT_NEAR(std::exp(skewt_log_pdf(x, p)), skewt_pdf(x, p), 1e-14);
    }
}

TEST(SkewT, NormalLimitAndSymmetry) {
    const SkewTParams big{1e7, 1.0};
    EXPECT_NEAR(skewt_quantile(0.5, big), 0.0, 1e-12);
    EXPECT_NEAR(skewt_quantile(0.975, big), 1.96, 0.01);
    for (double nu : {3.0, 5.0, 12.0}) {
        for (double prob : {0.01, 0.2, 0.4}) {
            EXPECT_NEAR(skewt_quantile(prob, {nu, 1.0}), -skewt_quantile(1.0 - prob, {nu, 1.0}), 1e-10);
        }
    }
}

TEST(SkewT, QuantileRoundTrip) {
    EXPECT_NEAR(skewt_cdf(skewt_quantile(0.99, {5, 2}), {5, 2}), 0.99, 1e-8);
    for (double nu : {3.0, 5.0, 10.0}) {
        for (double gamma : {0.7, 1.0, 1.5}) {
            for (double prob = 0.001; prob < 0.9995; prob += 0.0499) {
                const SkewTParams p{nu, gamma};
                ASSERT_NEAR(skewt_cdf(skewt_quantile(prob, p), p), prob, 1e-8) << nu << "," << gamma << "," << prob;
            }
        }
    }
}

TEST(SkewT, SamplerMoments) {
    PhiloxEngine e(RngSpec{21, 0});
    const SkewTParams p{6, 1.4};
    const int n = 200000;
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
        const double z = skewt_from_uniform(e.uniform(), p);
        s += z;
        ss += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(ss / n, 1.0, 0.05);
}

TEST(Garch, DegenerateRecursion) {
    GarchParams p;
    p.a0 = 0.3;
    p.b0 = 4.0;
    const std::vector<double> x{1, -2, 3, 0.5};
    const FilteredSeries f = garch_filter(x, p);
    for (std::size_t t = 0; t < x.size(); ++t) {
        EXPECT_DOUBLE_EQ(f.cond_vol[t], 2.0);
        EXPECT_DOUBLE_EQ(f.cond_mean[t], 0.3);
    }
}

TEST(Garch, HandRecursion) {
    GarchParams p{0.1, 0.5, 0.2, 0.3, 0.4, {}};
    const std::vector<double> x{1.0, 2.0};
    const FilteredSeries f = garch_filter(x, p);
    const double var0 = 0.2 / 0.3;
    EXPECT_DOUBLE_EQ(f.cond_mean[0], 0.2);
    EXPECT_DOUBLE_EQ(f.cond_vol[0], std::sqrt(var0));
    const double eps0 = 1.0 - 0.2;
    EXPECT_NEAR(f.cond_mean[1], 0.1 + 0.5 * 1.0, 1e-15);
    EXPECT_NEAR(f.cond_vol[1], std::sqrt(0.2 + 0.3 * eps0 * eps0 + 0.4 * var0), 1e-15);
}

TEST(Garch, FilterRoundTrip) {
    const GarchParams p{0.01, 0.1, 0.05, 0.1, 0.85, {7, 1.2}};
    const auto x = simulate_garch(p, 3000, RngSpec{22, 0});
    const FilteredSeries f = garch_filter(x, p);
    double worst = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        worst = std::max(worst, std::abs(f.cond_mean[t] + f.cond_vol[t] * f.residuals[t] - x[t]));
    }
    EXPECT_LE(worst, 1e-12);
    EXPECT_NEAR(stats::variance_n(f.residuals), 1.0, 0.05);
}

TEST(Garch, InvalidParams) {
    GarchParams p;
    p.b1 = 0.6;
    p.b2 = 0.5;
    EXPECT_EQ(kind_of([&] { (void)garch_filter(std::vector<double>{1, 2}, p); }), ErrorKind::BadParams);
}

TEST(Garch, FitErrors) {
    EXPECT_EQ(kind_of([] { (void)garch_fit(std::vector<double>(500, 1.5)); }), ErrorKind::DegenerateSeries);
    EXPECT_EQ(kind_of([] { (void)garch_fit(std::vector<double>(100, 1.5)); }), ErrorKind::TooFewObservations);
    std::vector<double> x = normal_series(400, RngSpec{1, 1});
    x[7] = std::nan("");
    EXPECT_EQ(kind_of([&] { (void)garch_fit(x); }), ErrorKind::NonFinite);
}

TEST(Garch, RecoversParameters) {
    const double s = 1.0;
    const GarchParams truth{0.0, 0.1, 0.05 * s, 0.1, 0.85, {}};
    const auto x = simulate_garch(truth, 3000, RngSpec{23, 0}, true);
    const GarchFit fit = garch_fit(x);
    EXPECT_NEAR(fit.params.b1 + fit.params.b2, 0.95, 0.05);
    EXPECT_NEAR(fit.params.a1, 0.1, 0.05);
    EXPECT_TRUE(std::isfinite(fit.loglik));
    EXPECT_GT(fit.params.innovation.nu, 10.0);  // Gaussian data push nu up

    // Refitting from the optimum stays there.
    const GarchFit again = garch_fit(x, fit.params);
    EXPECT_LT(std::abs(again.loglik - fit.loglik), 1e-6 * x.size());
    EXPECT_GE(again.loglik, fit.loglik - 1e-6);
}

TEST(Garch, NextStepRisesWithShock) {
    const GarchParams p{0.0, 0.1, 0.05, 0.1, 0.85, {}};
    std::vector<double> x = normal_series(500, RngSpec{24, 0});
    double prev_vol = 0.0;
    for (double shock : {0.0, 1.0, 3.0, 6.0}) {
        x.back() = shock;
        const NextStep next = garch_next(x, p, garch_filter(x, p));
        EXPECT_GT(next.vol, prev_vol);
        prev_vol = next.vol;
    }
}

TEST(EmpiricalVar, Examples) {
    std::vector<double> r(100);
    std::iota(r.begin(), r.end(), 1.0);
    EXPECT_EQ(empirical_var(r, 0.01), 99.0);
    EXPECT_EQ(empirical_var(std::vector<double>(200, 3.25), 0.01), 3.25);
    EXPECT_EQ(empirical_var(std::vector<double>{1, 2, 3, 4}, 0.5), 2.0);
    EXPECT_EQ(kind_of([] { (void)empirical_var(std::vector<double>(50, 1.0), 0.01); }), ErrorKind::TooFewObservations);
}

TEST(EmpiricalVar, MonotoneInTheta) {
    const auto r = normal_series(1000, RngSpec{25, 0});
    double prev = empirical_var(r, 0.001);
    for (double theta = 0.005; theta < 1.0; theta += 0.005) {
        const double v = empirical_var(r, theta);
        ASSERT_LE(v, prev);
        prev = v;
    }
}

TEST(EvtVar, ParetoAndExponential) {
    std::vector<double> pareto_err, exp_err, exp_xi;
    for (std::uint64_t rep = 0; rep < 15; ++rep) {
        PhiloxEngine e(RngSpec{26, rep});
        std::vector<double> pareto(3000), expo(3000);
        for (std::size_t i = 0; i < 3000; ++i) {
            const double u = e.uniform();
            pareto[i] = std::pow(u, -0.5);
            expo[i] = -std::log(u);
        }
        pareto_err.push_back(std::abs(evt_var(pareto, 0.01, 50) / 10.0 - 1.0));
        exp_err.push_back(std::abs(evt_var(expo, 0.01, 50) / std::log(100.0) - 1.0));
        exp_xi.push_back(fit_pot(expo, 50).xi);
    }
    EXPECT_LE(median(pareto_err), 0.10);
    EXPECT_LE(median(exp_err), 0.10);
    EXPECT_LE(std::abs(median(exp_xi)), 0.15);
}

TEST(EvtVar, ThresholdAndClosedForm) {
    std::vector<double> r(200);
    std::iota(r.begin(), r.end(), 1.0);
    const PotFit fit = fit_pot(r, 20);
    EXPECT_EQ(fit.threshold, 180.0);  // 21st largest
    EXPECT_EQ(fit.k, 20u);
    PotFit manual = fit;
    manual.xi = 0.5;
    manual.beta = 2.0;
    EXPECT_NEAR(pot_quantile(manual, 0.01), 180.0 + 4.0 * (std::sqrt(20.0 / 2.0) - 1.0), 1e-12);
    manual.xi = 0.0;
    EXPECT_NEAR(pot_quantile(manual, 0.01), 180.0 + 2.0 * std::log(10.0), 1e-12);
}

TEST(EvtVar, TranslationEquivariant) {
    auto r = normal_series(2000, RngSpec{27, 0});
    const double base = evt_var(r, 0.01, 50);
    for (double& v : r) v += 5.0;
    EXPECT_NEAR(evt_var(r, 0.01, 50), base + 5.0, 1e-9);
}

TEST(EvtVar, Errors) {
    const auto r = normal_series(100, RngSpec{28, 0});
    EXPECT_EQ(kind_of([&] { (void)evt_var(r, 0.01, 100); }), ErrorKind::TooFewExceedances);
    EXPECT_EQ(kind_of([&] { (void)evt_var(r, 0.01, 5); }), ErrorKind::TooFewExceedances);
    const std::vector<double> tied(300, 1.0);
    EXPECT_EQ(kind_of([&] { (void)evt_var(tied, 0.01, 50); }), ErrorKind::GpdNonConvergence);
}

TEST(ForecastVar, IidNormalWindow) {
    const auto w = normal_series(3000, RngSpec{29, 0});
    const VarForecast f = forecast_var(w, VarMethod{VarKind::Empirical, 50}, 0.01);
    EXPECT_NEAR(f.value, 2.326, 0.15);
    const VarForecast s = forecast_var(w, VarMethod{VarKind::SkewT, 50}, 0.01);
    EXPECT_NEAR(s.value, 2.326, 0.15);
    EXPECT_EQ(var_kind_from_string("sstd"), VarKind::SkewT);
    EXPECT_EQ(to_string(VarKind::EVT), "evt");
}

TEST(ForecastVar, SkewTDataBothMethodsNearTruth) {
    const GarchParams truth{0.0, 0.05, 0.05, 0.08, 0.9, {6.0, 1.3}};
    const auto x = simulate_garch(truth, 3001, RngSpec{30, 0});
    const std::span<const double> window(x.data(), 3000);
    const FilteredSeries f = garch_filter(window, truth);
    const NextStep next = garch_next(window, truth, f);
    const double true_var = next.mean + next.vol * skewt_quantile(0.99, truth.innovation);
    for (VarKind k : {VarKind::Empirical, VarKind::SkewT}) {
        const double est = forecast_var(window, VarMethod{k, 50}, 0.01).value;
        EXPECT_NEAR(est / true_var, 1.0, 0.10) << to_string(k);
    }
}

TEST(Rolling, ShapesAndErrors) {
    const auto x = normal_series(400, RngSpec{31, 0});
    RollingConfig cfg;
    cfg.window = 300;
    cfg.horizon = 0;
    EXPECT_TRUE(rolling_forecasts(x, cfg, VarMethod{}).empty());
    cfg.horizon = 101;
    EXPECT_EQ(kind_of([&] { (void)rolling_forecasts(x, cfg, VarMethod{}); }), ErrorKind::InsufficientHistory);
    cfg.horizon = 4;
    const std::vector<VarMethod> methods{{VarKind::Empirical, 50}, {VarKind::SkewT, 50}, {VarKind::EVT, 50}};
    const auto out = rolling_forecasts(x, cfg, methods);
    ASSERT_EQ(out.size(), 3u);
    for (const auto& v : out) EXPECT_EQ(v.size(), 4u);
    // The first forecast is the one-step forecast from the leading window.
    const VarForecast first = forecast_var(std::span<const double>(x).subspan(96, 300), methods[0], 0.01);
    EXPECT_NEAR(out[0][0], first.value, 1e-9);
}

TEST(Rolling, RefitCadenceMatters) {
    const GarchParams truth{0.0, 0.05, 0.05, 0.08, 0.9, {}};
    const auto x = simulate_garch(truth, 1020, RngSpec{32, 0}, true);
    RollingConfig daily;
    daily.window = 1000;
    daily.horizon = 20;
    RollingConfig once = daily;
    once.refit_every = 20;
    const auto a = rolling_forecasts(x, daily, VarMethod{VarKind::SkewT, 50});
    const auto b = rolling_forecasts(x, once, VarMethod{VarKind::SkewT, 50});
    double rel = 0.0;
    for (std::size_t h = 0; h < a.size(); ++h) rel += std::abs(a[h] - b[h]) / std::abs(a[h]);
    EXPECT_LT(rel / a.size(), 0.05);
    EXPECT_EQ(a[0], b[0]);
}
