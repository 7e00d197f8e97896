// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status
// is nonzero if any criterion fails.

#include "poolmax/backtest.hpp"
#include "poolmax/error.hpp"
#include "poolmax/garch.hpp"
#include "poolmax/pooltest.hpp"
#include "poolmax/simlab.hpp"
#include "poolmax/stats.hpp"
#include "poolmax/subsets.hpp"
#include "poolmax/var_estimators.hpp"
#include "poolmax_cli/cli.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace poolmax;
namespace fs = std::filesystem;

namespace {

struct Band {
    double lo;
    double hi;
    [[nodiscard]] bool contains(double r) const { return r >= lo && r <= hi; }
};

// Exact binomial 99% acceptance region for the rejection rate around alpha.
Band binomial_band(std::size_t reps, double alpha) {
    const boost::math::binomial_distribution<double> bin(static_cast<double>(reps), alpha);
    const double lo = std::floor(boost::math::quantile(bin, 0.005));
    const double hi = std::ceil(boost::math::quantile(boost::math::complement(bin, 0.005)));
    return {lo / static_cast<double>(reps), hi / static_cast<double>(reps)};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << " -- " << o.detail
              << fmt(" (%.1fs)", secs) << std::endl;
}

constexpr std::uint64_t kSeed = 20240601;
constexpr std::size_t kReps = 500;

simlab::DgpSpec a1(bool under_null) {
    simlab::DgpSpec s;
    s.model = simlab::Model::A1;
    s.n = 500;
    s.p = 100;
    s.p0 = 20;
    s.under_null = under_null;
    s.rng = RngSpec{kSeed, 0};
    return s;
}

simlab::SweepConfig a1_sweep(std::vector<MethodTag> methods) {
    simlab::SweepConfig cfg;
    cfg.q_grid = {49};
    cfg.d_grid = {200};
    cfg.replicates = 500;
    cfg.mc_reps = kReps;
    cfg.methods = std::move(methods);
    cfg.threads = 0;
    return cfg;
}

const simlab::SweepRow& row_for(const simlab::SweepResult& r, MethodTag m) {
    for (const auto& row : r.rows) {
        if (row.method == m) return row;
    }
    throw std::runtime_error("missing sweep row");
}

Outcome identifiability_oracle() {
    std::size_t cases = 0, witnesses = 0;
    for (std::size_t p = 2; p <= 12; ++p) {
        for (std::size_t q = 1; q < p; ++q) {
            ++cases;
            const auto rep = verify_identifiability(p, q);
            if (rep.identifiable != (gcd(p, q) == 1)) return {false, fmt("wrong verdict at p=%zu q=%zu", p, q)};
            if (rep.identifiable) continue;
            if (!rep.witness) return {false, fmt("no witness at p=%zu q=%zu", p, q)};
            const auto& w = *rep.witness;
            if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
                return {false, fmt("zero witness at p=%zu q=%zu", p, q)};
            }
            for (std::size_t l = 0; l < p; ++l) {
                double s = 0.0;
                for (std::size_t k = 0; k < q; ++k) s += w[(l + k) % p];
                if (s != 0.0) return {false, fmt("window sum %g at p=%zu q=%zu l=%zu", s, p, q, l)};
            }
            ++witnesses;
        }
    }
    return {true, fmt("%zu (p,q) pairs, %zu verified kernel witnesses", cases, witnesses)};
}

Outcome size_calibration() {
    const Band band = binomial_band(kReps, 0.05);
    const auto r = simlab::run_sweep(a1(true), a1_sweep({MethodTag::SubsetsPool, MethodTag::Naive}));
    const auto& pool = row_for(r, MethodTag::SubsetsPool);
    const auto& naive = row_for(r, MethodTag::Naive);
    return {band.contains(pool.reject_rate) && band.contains(naive.reject_rate),
            fmt("pool %.3f, naive %.3f, band [%.3f, %.3f], degenerate %zu/%zu", pool.reject_rate, naive.reject_rate,
                band.lo, band.hi, pool.degenerate_reps, naive.degenerate_reps)};
}

Outcome cancellation() {
    const Band band = binomial_band(kReps, 0.05);
    const auto r =
        simlab::run_sweep(a1(false), a1_sweep({MethodTag::SubsetsPool, MethodTag::Naive, MethodTag::Marginal}));
    const auto& pool = row_for(r, MethodTag::SubsetsPool);
    const auto& naive = row_for(r, MethodTag::Naive);
    const auto& marg = row_for(r, MethodTag::Marginal);
    return {band.contains(naive.reject_rate) && pool.reject_rate >= naive.reject_rate + 0.25,
            fmt("pool %.3f, naive %.3f (band [%.3f, %.3f]); marginal %.3f with %zu/%zu degenerate reps (not gated)",
                pool.reject_rate, naive.reject_rate, band.lo, band.hi, marg.reject_rate, marg.degenerate_reps,
                kReps)};
}

Outcome bootstrap_covariance() {
    simlab::DgpSpec s = a1(true);
    s.n = 200;
    s.p = 20;
    s.p0 = 4;
    const DataMatrix x = simlab::generate(s, RngSpec{kSeed, 4});
    const SubsetFamily fam = build_family(20, 7, 40, RngSpec{kSeed, 5});
    const PooledPanel panel = pooled_panel(x, fam);
    BootstrapConfig cfg;
    cfg.replicates = 100000;
    cfg.rng = RngSpec{kSeed, 6};
    cfg.threads = 0;
    const Matrix tb = bootstrap_t_vectors(panel, cfg);

    const double n = static_cast<double>(panel.n());
    const Vector scale = (n * panel.sigma_hat.array()).sqrt().inverse().matrix();
    const Matrix sigma = scale.asDiagonal() * (panel.y.transpose() * panel.y) * scale.asDiagonal();
    const Eigen::RowVectorXd mean = tb.colwise().mean();
    const Matrix centred = tb.rowwise() - mean;
    const Matrix cov = centred.transpose() * centred / static_cast<double>(tb.rows());
    const double cov_err = (cov - sigma).cwiseAbs().maxCoeff();
    const double mean_err = mean.cwiseAbs().maxCoeff();
    return {cov_err <= 0.02 && mean_err <= 0.01,
            fmt("max |cov - Sigma_hat| = %.4f, max |mean| = %.4f over d=40", cov_err, mean_err)};
}

Outcome reduction_identity() {
    simlab::DgpSpec s;
    s.model = simlab::Model::B1;
    s.n = 200;
    s.p = 20;
    s.p0 = 4;
    const SubsetFamily single = singleton_family(20);
    for (std::uint64_t k = 0; k < 100; ++k) {
        const DataMatrix x = simlab::generate(s, RngSpec{kSeed + 7, k});
        BootstrapConfig cfg;
        cfg.replicates = 300;
        cfg.rng = RngSpec{kSeed + 8, k};
        const TestResult a = marginal_test(x, 0.05, cfg);
        const TestResult b = pool_test(x, single, 0.05, cfg);
        if (a.statistic != b.statistic || a.critical_value != b.critical_value || a.p_value != b.p_value ||
            a.reject != b.reject || a.per_subset_t != b.per_subset_t) {
            return {false, fmt("dataset %llu differs", static_cast<unsigned long long>(k))};
        }
    }
    return {true, "100 datasets identical in statistic, critical value, p-value, decision and T vector"};
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

Outcome scale_invariance() {
    simlab::DgpSpec s;
    s.model = simlab::Model::B1;
    s.n = 200;
    s.p = 20;
    s.p0 = 4;
    const SubsetFamily fam = build_family(20, 7, 40, RngSpec{kSeed + 9, 0});
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const DataMatrix x = simlab::generate(s, RngSpec{kSeed + 10, k});
        BootstrapConfig cfg;
        cfg.replicates = 300;
        cfg.rng = RngSpec{kSeed + 11, k};
        const TestResult base = pool_test(x, fam, 0.05, cfg);
        for (double c : {1e-6, 1.0, 1e6}) {
            const TestResult r = pool_test(DataMatrix(x.values() * c), fam, 0.05, cfg);
            for (auto [u, v] : {std::pair{base.statistic, r.statistic}, std::pair{base.critical_value, r.critical_value},
                                std::pair{base.p_value, r.p_value}}) {
                worst = std::max(worst, std::abs(u - v) / std::max(std::abs(u), std::abs(v)));
                if (!rel_close(u, v, 1e-10)) return {false, fmt("dataset %llu, c=%g", (unsigned long long)k, c)};
            }
            if (r.reject != base.reject) return {false, fmt("decision flips on dataset %llu", (unsigned long long)k)};
        }
    }
    return {true, fmt("100 datasets x 3 scales, worst relative change %.2e", worst)};
}

Outcome score_consistency() {
    PhiloxEngine e(RngSpec{kSeed + 12, 0});
    std::vector<double> x(1000000);
    for (double& v : x) v = e.normal();
    double best_r = 0.0, best = INFINITY;
    for (int k = 0; k <= 200; ++k) {
        const double r = 1.5 + 0.01 * k;
        double s = 0.0;
        for (double v : x) s += backtest::var_score(r, v, 0.01);
        s /= static_cast<double>(x.size());
        if (s < best) {
            best = s;
            best_r = r;
        }
    }
    return {std::abs(best_r - 2.326) <= 0.05, fmt("argmin %.2f (target 2.326)", best_r)};
}

Outcome garch_recovery() {
    GarchParams truth;
    truth.a0 = 0.0;
    truth.a1 = 0.1;
    truth.b0 = 0.05;
    truth.b1 = 0.1;
    truth.b2 = 0.85;
    truth.innovation = SkewTParams{8.0, 1.2};
    std::vector<double> errs;
    double worst_trip = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto x = simulate_garch(truth, 3000, RngSpec{kSeed + 13, k});
        const GarchFit fit = garch_fit(x);
        errs.push_back(std::abs(fit.params.b1 + fit.params.b2 - 0.95));
        for (const GarchParams& p : {truth, fit.params}) {
            const FilteredSeries f = garch_filter(x, p);
            for (std::size_t t = 0; t < x.size(); ++t) {
                const double back = f.cond_mean[t] + f.cond_vol[t] * f.residuals[t];
                worst_trip = std::max(worst_trip, std::abs(back - x[t]) / std::max(1.0, std::abs(x[t])));
            }
        }
    }
    const double med = median(errs);
    return {med <= 0.05 && worst_trip <= 1e-12,
            fmt("median |b1+b2 - 0.95| = %.4f, worst filter round trip %.1e", med, worst_trip)};
}

Outcome evt_oracle() {
    const double theta = 0.01;
    const double pareto_q = std::pow(theta, -0.5);
    const double exp_q = -std::log(theta);
    std::vector<double> pe, ee;
    for (std::uint64_t k = 0; k < 50; ++k) {
        PhiloxEngine e(RngSpec{kSeed + 14, k});
        std::vector<double> par(3000), ex(3000);
        for (double& v : par) v = std::pow(e.uniform(), -0.5);
        for (double& v : ex) v = -std::log(e.uniform());
        pe.push_back(std::abs(evt_var(par, theta, 50) / pareto_q - 1.0));
        ee.push_back(std::abs(evt_var(ex, theta, 50) / exp_q - 1.0));
    }
    const double mp = median(pe), me = median(ee);
    return {mp <= 0.10 && me <= 0.10, fmt("median relative error: Pareto(2) %.3f, Exp(1) %.3f", mp, me)};
}

Outcome validation_calibration() {
    const Band band = binomial_band(kReps, 0.05);
    const double z = stats::normal_quantile(0.99);
    const Matrix cov = simlab::covariance_for(simlab::Model::A1, 100);
    const SubsetFamily fam = build_family(100, 49, 200, RngSpec{kSeed + 15, 0});
    const Matrix r = Matrix::Constant(500, 100, z);
    std::size_t rejections = 0, degenerate = 0;
    for (std::uint64_t k = 0; k < kReps; ++k) {
        const DataMatrix u = simlab::sample_gaussian(500, cov, RngSpec{kSeed + 16, k});
        BootstrapConfig cfg;
        cfg.replicates = 500;
        cfg.rng = RngSpec{kSeed + 17, k};
        try {
            const TestResult v = backtest::validation_test(u, r, 0.01, fam, 0.05, cfg);
            const TestResult p = pool_test(backtest::exceedance_matrix(u, r, 0.01), fam, 0.05, cfg);
            if (v.statistic != p.statistic || v.critical_value != p.critical_value || v.p_value != p.p_value ||
                v.reject != p.reject || v.per_subset_t != p.per_subset_t) {
                return {false, fmt("composition identity broken at rep %llu", (unsigned long long)k)};
            }
            rejections += v.reject;
        } catch (const DegenerateVarianceError&) {
            ++degenerate;
        }
    }
    const double rate = static_cast<double>(rejections) / kReps;
    return {band.contains(rate), fmt("rejection rate %.3f, band [%.3f, %.3f], degenerate %zu; composition identity exact",
                                     rate, band.lo, band.hi, degenerate)};
}

Outcome tail_dependence_check() {
    PhiloxEngine e(RngSpec{kSeed + 18, 0});
    Matrix dup(500, 2);
    for (Eigen::Index i = 0; i < 500; ++i) dup(i, 0) = dup(i, 1) = e.normal();
    const double l_dup = backtest::tail_dependence(DataMatrix(dup), 0.01)(0, 1);
    Matrix ind(100000, 2);
    for (Eigen::Index i = 0; i < ind.rows(); ++i) {
        ind(i, 0) = e.normal();
        ind(i, 1) = e.normal();
    }
    const double l_ind = backtest::tail_dependence(DataMatrix(ind), 0.01)(0, 1);
    return {l_dup == 1.0 && std::abs(l_ind - 0.01) <= 0.005,
            fmt("duplicated column %.6f, independent columns %.4f", l_dup, l_ind)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome cli_determinism() {
    const fs::path dir = fs::temp_directory_path() / "poolmax_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto p = [&](const std::string& name) { return (dir / name).string(); };

    // Inputs for the downstream commands.
    std::ostringstream sink;
    if (cli::run({"simulate", "--dataset", "--n", "500", "--p", "100", "--seed", "1", "--out", p("x.csv")}, sink,
                 sink) != 0) {
        return {false, "could not simulate input panel"};
    }
    {
        PhiloxEngine e(RngSpec{kSeed + 19, 0});
        std::ofstream u(p("u.csv")), f1(p("f1.csv")), f2(p("f2.csv")), z(p("z.csv"));
        const int cols = 10;
        for (int j = 0; j < cols; ++j) {
            const std::string sep = j ? "," : "";
            u << sep << "s" << j;
            f1 << sep << "s" << j;
            f2 << sep << "s" << j;
            z << sep << "s" << j;
        }
        u << '\n', f1 << '\n', f2 << '\n', z << '\n';
        for (int i = 0; i < 1000; ++i) {
            const double common = e.normal();
            for (int j = 0; j < cols; ++j) {
                const std::string sep = j ? "," : "";
                u << sep << e.normal();
                f1 << sep << 2.326;
                f2 << sep << 2.0 + 0.1 * e.uniform();
                z << sep << common + e.normal();
            }
            u << '\n', f1 << '\n', f2 << '\n', z << '\n';
        }
    }

    const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
        {"sweep.csv", {"simulate", "--model", "A1", "--n", "200", "--p", "20", "--p0", "4", "--q", "7", "--B",
                       "100", "--mc-reps", "10", "--seed", "3"}},
        {"pool.json", {"pool-test", "--in", p("x.csv"), "--B", "500", "--seed", "3"}},
        {"naive.json", {"naive-test", "--in", p("x.csv")}},
        {"marginal.json", {"marginal-test", "--in", p("x.csv"), "--B", "500", "--seed", "3"}},
        {"backtest.csv", {"backtest", "--returns", p("u.csv"), "--forecast", "flat=" + p("f1.csv"), "--forecast",
                          "noisy=" + p("f2.csv"), "--q", "3", "--B", "300", "--seed", "3"}},
        {"taildep.csv", {"taildep", "--in", p("z.csv"), "--u", "0.05"}},
        {"subsets.json", {"subsets-check", "--p", "12", "--q", "5", "--d", "20", "--seed", "3"}},
    };
    std::size_t identical = 0;
    for (const auto& [name, args] : runs) {
        std::string outputs[2];
        for (int k = 0; k < 2; ++k) {
            auto a = args;
            const std::string out = p(std::to_string(k) + "_" + name);
            a.insert(a.end(), {"--out", out});
            std::ostringstream err;
            if (const int rc = cli::run(a, sink, err); rc != 0) {
                return {false, name + ": exit code " + std::to_string(rc) + " " + err.str()};
            }
            outputs[k] = slurp(out);
        }
        if (outputs[0].empty() || outputs[0] != outputs[1]) return {false, name + " differs between runs"};
        ++identical;
    }
    fs::remove_all(dir);
    return {true, fmt("%zu CLI outputs byte-identical across repeated runs", identical)};
}

}  // namespace

int main() {
    criterion(1, "Circular family identifiability matches gcd rule with exact witnesses", identifiability_oracle);
    criterion(2, "Size calibration under the indicator null", size_calibration);
    criterion(3, "Cancellation: pooled test detects offsetting drifts the naive test misses", cancellation);
    criterion(4, "Multiplier bootstrap reproduces the conditional covariance", bootstrap_covariance);
    criterion(5, "Marginal test equals pool test with singleton family", reduction_identity);
    criterion(6, "Scale invariance of statistic, critical value and p-value", scale_invariance);
    criterion(7, "VaR score is minimised at the true quantile", score_consistency);
    criterion(8, "AR-GARCH parameter recovery and filter round trip", garch_recovery);
    criterion(9, "EVT tail quantile against closed forms", evt_oracle);
    criterion(10, "Validation backtest calibration and composition identity", validation_calibration);
    criterion(11, "Tail dependence estimator", tail_dependence_check);
    criterion(12, "Deterministic CLI output", cli_determinism);
    std::cout << (failures ? "FAILED: " + std::to_string(failures) + " criteria" : std::string("ALL PASSED"))
              << std::endl;
    return failures ? 1 : 0;
}
