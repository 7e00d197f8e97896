#pragma once

#include "poolmax/matrix.hpp"
#include "poolmax/result.hpp"
#include "poolmax/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace poolmax::simlab {

enum class Model { A1, A2, B1, B2 };

[[nodiscard]] std::string_view to_string(Model model) noexcept;
[[nodiscard]] Model model_from_string(std::string_view name);

/// Data-generating process settings. A models perturb exceedance
/// probabilities of Gaussian indicators; B models shift a bounded continuous
/// mixture. Models *1 use the paired covariance, *2 the Toeplitz one.
struct DgpSpec {
    Model model = Model::A1;
    std::size_t n = 500;
    std::size_t p = 100;
    std::size_t p0 = 20;
    double alpha_n = 0.01;
    bool under_null = true;
    RngSpec rng{};
};

/// Checks the DgpSpec invariants (block sizes fit in p, alpha_n in (0, 0.5)).
void validate(const DgpSpec& spec);

/// Unit diagonal; 0.7 on the pairs (2k-1, 2k) for k = 1..floor(p/2).
[[nodiscard]] Matrix sigma1(std::size_t p);
/// Toeplitz 0.5^{|i-j|}.
[[nodiscard]] Matrix sigma2(std::size_t p);

/// n i.i.d. rows from N(0, cov). Uses a Cholesky factor, falling back to a
/// symmetric eigendecomposition for semi-definite input; NotPSD when an
/// eigenvalue is below -1e-10.
[[nodiscard]] DataMatrix sample_gaussian(std::size_t n, const Matrix& cov, const RngSpec& rng);

/// X = 1{Z > Phi^{-1}(1 - theta_j)} - 0.01.
[[nodiscard]] DataMatrix model_a(const DataMatrix& z, std::span<const double> thetas);

/// Null: all 0.01. Alternative: p0 at 0.025, then 3 p0 at 0.005, rest 0.01.
[[nodiscard]] std::vector<double> theta_profile(std::size_t p, std::size_t p0, bool under_null);

/// Piecewise-linear map of [0,1] onto [-1,1]; U(0,1) input gives the mixture
/// (1 - a) U(-a, a) + a U(-1, 1). The break point 1 - a belongs to the left piece.
[[nodiscard]] double g_transform(double x, double alpha_n);

/// X = g(Phi(Z)) - mu_j.
[[nodiscard]] DataMatrix model_b(const DataMatrix& z, std::span<const double> mus, double alpha_n);

/// Null: all 0. Alternative: p0 at -0.0075, then p0 at +0.0075, rest 0.
[[nodiscard]] std::vector<double> mu_profile(std::size_t p, std::size_t p0, bool under_null);

[[nodiscard]] Matrix covariance_for(Model model, std::size_t p);

/// One dataset from the process described by `spec`, drawn from `rng`.
[[nodiscard]] DataMatrix generate(const DgpSpec& spec, const RngSpec& rng);

struct SweepConfig {
    std::vector<std::size_t> q_grid{49};
    /// Empty means {2p}.
    std::vector<std::size_t> d_grid{};
    double alpha = 0.05;
    std::size_t replicates = 1000;
    std::size_t mc_reps = 1000;
    std::vector<MethodTag> methods{MethodTag::SubsetsPool, MethodTag::Naive, MethodTag::Marginal};
    unsigned threads = 1;
};

struct SweepRow {
    std::size_t q = 0;
    std::size_t d = 0;
    MethodTag method = MethodTag::SubsetsPool;
    double reject_rate = 0.0;
    /// Replications where the method's statistic was undefined (a constant
    /// pooled sum or column). They are excluded from reject_rate.
    std::size_t degenerate_reps = 0;
};

struct SweepResult {
    Model model = Model::A1;
    double alpha = 0.05;
    std::size_t mc_reps = 0;
    std::vector<SweepRow> rows;
};

/// Monte Carlo rejection rates on the (q, d) grid (cartesian product of the
/// two lists). Replication r uses the same dataset at every grid point.
/// Throws NotCoprime before any simulation if some q shares a factor with p.
[[nodiscard]] SweepResult run_sweep(const DgpSpec& spec, const SweepConfig& config);

/// Long format: model,q,d,method,alpha,mc_reps,reject_rate,degenerate_reps
void write_csv(std::ostream& out, const SweepResult& result);
void to_json(nlohmann::json& j, const SweepResult& result);

[[nodiscard]] DgpSpec dgp_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const DgpSpec& spec);

}  // namespace poolmax::simlab
