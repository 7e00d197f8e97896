#include "poolmax/simlab.hpp"

#include "poolmax/error.hpp"
#include "poolmax/io.hpp"
#include "poolmax/parallel.hpp"
#include "poolmax/pooltest.hpp"
#include "poolmax/stats.hpp"
#include "poolmax/subsets.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>

namespace poolmax::simlab {

namespace {

// Root substreams of a sweep; replication r then takes substream(root, r).
constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kFamilyStream = 1;
constexpr std::uint64_t kBootstrapStream = 2;

bool uses_sigma1(Model m) noexcept { return m == Model::A1 || m == Model::B1; }
bool is_a_model(Model m) noexcept { return m == Model::A1 || m == Model::A2; }

}  // namespace

std::string_view to_string(Model model) noexcept {
    switch (model) {
        case Model::A1: return "A1";
        case Model::A2: return "A2";
        case Model::B1: return "B1";
        case Model::B2: return "B2";
    }
    return "A1";
}

Model model_from_string(std::string_view name) {
    if (name == "A1") return Model::A1;
    if (name == "A2") return Model::A2;
    if (name == "B1") return Model::B1;
    if (name == "B2") return Model::B2;
    fail(ErrorKind::BadParams, "unknown model '" + std::string(name) + "' (expected A1, A2, B1 or B2)");
}

void validate(const DgpSpec& spec) {
    if (spec.n < 2 || spec.p < 1) fail(ErrorKind::TooSmall, "simulation needs n >= 2 and p >= 1");
    const std::size_t block = is_a_model(spec.model) ? 4 : 2;
    if (block * spec.p0 > spec.p) {
        fail(ErrorKind::ProfileOverflow, std::to_string(block) + "*p0 = " + std::to_string(block * spec.p0) +
                                             " exceeds p = " + std::to_string(spec.p));
    }
    if (!(spec.alpha_n > 0.0 && spec.alpha_n < 0.5)) {
        fail(ErrorKind::OutOfRange, "alpha_n must lie in (0, 0.5), got " + std::to_string(spec.alpha_n));
    }
}

Matrix sigma1(std::size_t p) {
    Matrix s = Matrix::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t k = 1; k <= p / 2; ++k) {
        const auto a = static_cast<Eigen::Index>(2 * k - 2);
        const auto b = static_cast<Eigen::Index>(2 * k - 1);
        s(a, b) = 0.7;
        s(b, a) = 0.7;
    }
    return s;
}

Matrix sigma2(std::size_t p) {
    const auto pp = static_cast<Eigen::Index>(p);
    Matrix s(pp, pp);
    for (Eigen::Index i = 0; i < pp; ++i) {
        for (Eigen::Index j = 0; j < pp; ++j) s(i, j) = std::pow(0.5, static_cast<double>(std::abs(i - j)));
    }
    return s;
}

DataMatrix sample_gaussian(std::size_t n, const Matrix& cov, const RngSpec& rng) {
    constexpr double kTolerance = 1e-10;
    const Eigen::Index p = cov.rows();
    if (p < 1 || cov.cols() != p) fail(ErrorKind::DimensionMismatch, "covariance must be square and non-empty");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kTolerance) {
        fail(ErrorKind::NotPSD, "covariance matrix is not symmetric");
    }

    Eigen::MatrixXd factor;
    const Eigen::MatrixXd dense = cov;
    Eigen::LLT<Eigen::MatrixXd> llt(dense);
    if (llt.info() == Eigen::Success) {
        factor = llt.matrixL();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
        if (eig.info() != Eigen::Success) fail(ErrorKind::NotPSD, "eigendecomposition of covariance failed");
        const Eigen::VectorXd& lambda = eig.eigenvalues();
        if (lambda.minCoeff() < -kTolerance) {
            fail(ErrorKind::NotPSD, "covariance has eigenvalue " + std::to_string(lambda.minCoeff()));
        }
        factor = eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }

    PhiloxEngine engine(rng);
    Matrix g(static_cast<Eigen::Index>(n), p);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < p; ++j) g(i, j) = engine.normal();
    }
    Matrix z = g * factor.transpose();
    return DataMatrix(std::move(z));
}

DataMatrix model_a(const DataMatrix& z, std::span<const double> thetas) {
    if (thetas.size() != z.cols()) {
        fail(ErrorKind::DimensionMismatch, "theta vector has length " + std::to_string(thetas.size()) +
                                               ", expected " + std::to_string(z.cols()));
    }
    std::vector<double> cut(thetas.size());
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        if (!(thetas[j] > 0.0 && thetas[j] < 1.0)) {
            fail(ErrorKind::BadTheta, "theta_" + std::to_string(j + 1) + " must lie in (0,1)");
        }
        cut[j] = stats::normal_quantile(1.0 - thetas[j]);
    }
    Matrix x(z.values().rows(), z.values().cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            x(i, j) = (z.values()(i, j) > cut[static_cast<std::size_t>(j)] ? 1.0 : 0.0) - 0.01;
        }
    }
    return DataMatrix(std::move(x));
}

std::vector<double> theta_profile(std::size_t p, std::size_t p0, bool under_null) {
    if (4 * p0 > p) {
        fail(ErrorKind::ProfileOverflow, "4*p0 = " + std::to_string(4 * p0) + " exceeds p = " + std::to_string(p));
    }
    std::vector<double> theta(p, 0.01);
    if (under_null) return theta;
    std::fill_n(theta.begin(), p0, 0.025);
    std::fill_n(theta.begin() + static_cast<std::ptrdiff_t>(p0), 3 * p0, 0.005);
    return theta;
}

double g_transform(double x, double alpha_n) {
    if (!(alpha_n > 0.0 && alpha_n < 0.5)) {
        fail(ErrorKind::OutOfRange, "alpha_n must lie in (0, 0.5), got " + std::to_string(alpha_n));
    }
    if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::OutOfRange, "g is defined on [0,1], got " + std::to_string(x));
    if (x <= 1.0 - alpha_n) return (2.0 * alpha_n / (1.0 - alpha_n)) * x - alpha_n;
    return (2.0 / alpha_n) * x + 1.0 - 2.0 / alpha_n;
}

DataMatrix model_b(const DataMatrix& z, std::span<const double> mus, double alpha_n) {
    if (mus.size() != z.cols()) {
        fail(ErrorKind::DimensionMismatch, "mu vector has length " + std::to_string(mus.size()) + ", expected " +
                                               std::to_string(z.cols()));
    }
    Matrix x(z.values().rows(), z.values().cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            x(i, j) = g_transform(stats::normal_cdf(z.values()(i, j)), alpha_n) - mus[static_cast<std::size_t>(j)];
        }
    }
    return DataMatrix(std::move(x));
}

std::vector<double> mu_profile(std::size_t p, std::size_t p0, bool under_null) {
    if (2 * p0 > p) {
        fail(ErrorKind::ProfileOverflow, "2*p0 = " + std::to_string(2 * p0) + " exceeds p = " + std::to_string(p));
    }
    std::vector<double> mu(p, 0.0);
    if (under_null) return mu;
    std::fill_n(mu.begin(), p0, -0.0075);
    std::fill_n(mu.begin() + static_cast<std::ptrdiff_t>(p0), p0, 0.0075);
    return mu;
}

Matrix covariance_for(Model model, std::size_t p) {
    return uses_sigma1(model) ? sigma1(p) : sigma2(p);
}

DataMatrix generate(const DgpSpec& spec, const RngSpec& rng) {
    validate(spec);
    const DataMatrix z = sample_gaussian(spec.n, covariance_for(spec.model, spec.p), rng);
    if (is_a_model(spec.model)) return model_a(z, theta_profile(spec.p, spec.p0, spec.under_null));
    return model_b(z, mu_profile(spec.p, spec.p0, spec.under_null), spec.alpha_n);
}

SweepResult run_sweep(const DgpSpec& spec, const SweepConfig& config) {
    validate(spec);
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) fail(ErrorKind::OutOfRange, "alpha must lie in (0,1)");
    if (config.replicates < 1) fail(ErrorKind::BadParams, "bootstrap needs at least one replicate");

    std::vector<std::size_t> d_grid = config.d_grid;
    if (d_grid.empty()) d_grid.push_back(2 * spec.p);
    for (std::size_t q : config.q_grid) {
        if (q < 1 || q >= spec.p) fail(ErrorKind::BadCardinality, "q=" + std::to_string(q) + " must satisfy 1 <= q < p");
        if (gcd(spec.p, q) != 1) {
            std::string msg = "q must be coprime with p (q=" + std::to_string(q) + ", p=" + std::to_string(spec.p) + ")";
            if (auto alt = nearest_coprime(spec.p, q)) msg += "; nearest coprime q is " + std::to_string(*alt);
            fail(ErrorKind::NotCoprime, msg);
        }
    }
    for (std::size_t d : d_grid) {
        if (d < spec.p) fail(ErrorKind::DTooSmall, "d=" + std::to_string(d) + " must be at least p");
    }

    const auto wants = [&](MethodTag m) {
        return std::find(config.methods.begin(), config.methods.end(), m) != config.methods.end();
    };
    const bool run_pool = wants(MethodTag::SubsetsPool);
    const bool run_naive = wants(MethodTag::Naive);
    const bool run_marginal = wants(MethodTag::Marginal);

    struct Grid {
        std::size_t q, d;
    };
    std::vector<Grid> grid;
    for (std::size_t q : config.q_grid) {
        for (std::size_t d : d_grid) grid.push_back({q, d});
    }

    // Outcome per replication: 1 = reject, 0 = accept, -1 = degenerate.
    const std::size_t reps = config.mc_reps;
    std::vector<signed char> pool_out(reps * grid.size(), 0);
    std::vector<signed char> naive_out(reps, 0);
    std::vector<signed char> marginal_out(reps, 0);

    const RngSpec data_root = substream(spec.rng, kDataStream);
    const RngSpec family_root = substream(spec.rng, kFamilyStream);
    const RngSpec boot_root = substream(spec.rng, kBootstrapStream);

    parallel_for(reps, config.threads, [&](std::size_t r) {
        const DataMatrix x = generate(spec, substream(data_root, r));
        const BootstrapConfig boot{config.replicates, substream(boot_root, r), 1};
        if (run_naive) {
            try {
                naive_out[r] = naive_test(x, config.alpha).reject ? 1 : 0;
            } catch (const DegenerateVarianceError&) {
                naive_out[r] = -1;
            }
        }
        if (run_marginal) {
            try {
                marginal_out[r] = marginal_test(x, config.alpha, boot).reject ? 1 : 0;
            } catch (const DegenerateVarianceError&) {
                marginal_out[r] = -1;
            }
        }
        if (run_pool) {
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const RngSpec fam_rng = substream(substream(family_root, g), r);
                const SubsetFamily fam = build_family(spec.p, grid[g].q, grid[g].d, fam_rng);
                signed char outcome;
                try {
                    outcome = pool_test(x, fam, config.alpha, boot).reject ? 1 : 0;
                } catch (const DegenerateVarianceError&) {
                    outcome = -1;
                }
                pool_out[r * grid.size() + g] = outcome;
            }
        }
    });

    const auto summarize = [&](auto outcome_at) {
        std::size_t rejects = 0, degenerate = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            const signed char o = outcome_at(r);
            if (o < 0) ++degenerate;
            else rejects += static_cast<std::size_t>(o);
        }
        const std::size_t valid = reps - degenerate;
        const double rate = valid == 0 ? 0.0 : static_cast<double>(rejects) / static_cast<double>(valid);
        return std::pair{rate, degenerate};
    };

    SweepResult result;
    result.model = spec.model;
    result.alpha = config.alpha;
    result.mc_reps = reps;
    if (reps == 0) return result;

    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (MethodTag m : config.methods) {
            std::pair<double, std::size_t> s;
            switch (m) {
                case MethodTag::SubsetsPool:
                    s = summarize([&](std::size_t r) { return pool_out[r * grid.size() + g]; });
                    break;
                case MethodTag::Naive:
                    s = summarize([&](std::size_t r) { return naive_out[r]; });
                    break;
                case MethodTag::Marginal:
                    s = summarize([&](std::size_t r) { return marginal_out[r]; });
                    break;
            }
            result.rows.push_back(SweepRow{grid[g].q, grid[g].d, m, s.first, s.second});
        }
    }
    return result;
}

void write_csv(std::ostream& out, const SweepResult& result) {
    out << "model,q,d,method,alpha,mc_reps,reject_rate,degenerate_reps\n";
    for (const SweepRow& row : result.rows) {
        out << to_string(result.model) << ',' << row.q << ',' << row.d << ',' << poolmax::to_string(row.method) << ','
            << io::format_number(result.alpha) << ',' << result.mc_reps << ',' << io::format_number(row.reject_rate)
            << ',' << row.degenerate_reps << '\n';
    }
}

void to_json(nlohmann::json& j, const SweepResult& result) {
    j = nlohmann::json{{"model", std::string(to_string(result.model))},
                       {"alpha", result.alpha},
                       {"mc_reps", result.mc_reps},
                       {"rows", nlohmann::json::array()}};
    for (const SweepRow& row : result.rows) {
        j["rows"].push_back({{"q", row.q},
                             {"d", row.d},
                             {"method", std::string(poolmax::to_string(row.method))},
                             {"reject_rate", row.reject_rate},
                             {"degenerate_reps", row.degenerate_reps}});
    }
}

DgpSpec dgp_from_json(const nlohmann::json& j) {
    try {
        DgpSpec spec;
        spec.model = model_from_string(j.at("model").get<std::string>());
        spec.n = j.value("n", spec.n);
        spec.p = j.value("p", spec.p);
        spec.p0 = j.value("p0", spec.p0);
        spec.alpha_n = j.value("alpha_n", spec.alpha_n);
        spec.under_null = j.value("under_null", spec.under_null);
        spec.rng.seed = j.value("seed", spec.rng.seed);
        spec.rng.stream_id = j.value("stream_id", spec.rng.stream_id);
        validate(spec);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, std::string("malformed DGP config: ") + e.what());
    }
}

void to_json(nlohmann::json& j, const DgpSpec& spec) {
    j = nlohmann::json{{"model", std::string(to_string(spec.model))},
                       {"n", spec.n},
                       {"p", spec.p},
                       {"p0", spec.p0},
                       {"alpha_n", spec.alpha_n},
                       {"under_null", spec.under_null},
                       {"seed", spec.rng.seed},
                       {"stream_id", spec.rng.stream_id}};
}

}  // namespace poolmax::simlab
