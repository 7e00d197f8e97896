#include "poolmax_cli/cli.hpp"

#include "poolmax/backtest.hpp"
#include "poolmax/error.hpp"
#include "poolmax/garch.hpp"
#include "poolmax/io.hpp"
#include "poolmax/parallel.hpp"
#include "poolmax/pooltest.hpp"
#include "poolmax/simlab.hpp"
#include "poolmax/subsets.hpp"
#include "poolmax/var_estimators.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace poolmax::cli {

namespace {

// Stream ids under the root seed; every subcommand derives its randomness
// from these so runs are reproducible from (inputs, argv).
constexpr std::uint64_t kFamilyStream = 0;
constexpr std::uint64_t kBootstrapStream = 1;

struct Common {
    double alpha = 0.05;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string format;
    std::string out;
};

struct PoolOptions {
    std::string in;
    std::size_t q = 49;
    std::size_t d = 0;  // 0 = 2p
    std::size_t replicates = 1000;
    std::string subsets;
};

struct SimulateOptions {
    std::string config;
    std::string model = "A1";
    std::size_t n = 500;
    std::size_t p = 100;
    std::size_t p0 = 20;
    double alpha_n = 0.01;
    bool alternative = false;
    std::vector<std::size_t> q_grid{49};
    std::vector<std::size_t> d_grid;
    std::size_t replicates = 1000;
    std::size_t mc_reps = 1000;
    std::vector<std::string> methods{"pool", "naive", "marginal"};
    bool dataset = false;
};

struct BacktestOptions {
    std::string returns;
    std::vector<std::string> forecasts;
    std::string history;
    std::size_t window = 3000;
    std::size_t horizon = 0;
    std::vector<std::string> methods{"empirical", "sstd", "evt"};
    std::size_t refit_every = 1;
    std::size_t evt_k = 50;
    std::string forecasts_out;
    double theta0 = 0.01;
    std::size_t q = 49;
    std::size_t d = 0;
    std::size_t replicates = 1000;
};

struct TaildepOptions {
    std::string in;
    double u = 0.01;
    bool filter = false;
    std::string sectors;
};

struct SubsetsOptions {
    std::size_t p = 0;
    std::size_t q = 0;
    std::size_t d = 0;
    std::size_t max_p = 64;
};

void emit(const Common& common, std::ostream& out, const std::string& text) {
    if (common.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(common.out, std::ios::binary | std::ios::trunc);
    if (!file) fail(ErrorKind::ParseError, "cannot open '" + common.out + "' for writing");
    file << text;
    if (!file) fail(ErrorKind::ParseError, "failed writing '" + common.out + "'");
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string result_csv(const TestResult& r) {
    std::ostringstream s;
    s << "method,statistic,critical_value,p_value,reject,alpha\n";
    s << to_string(r.method_tag) << ',' << io::format_number(r.statistic) << ','
      << io::format_number(r.critical_value) << ',' << io::format_number(r.p_value) << ','
      << (r.reject ? "true" : "false") << ',' << io::format_number(r.alpha) << '\n';
    return s.str();
}

std::string render(const Common& common, const TestResult& r) {
    if (common.format == "csv") return result_csv(r);
    return dump(nlohmann::json(r));
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::OutOfRange, "--alpha must lie in (0,1)");
}

void check_replicates(std::size_t b) {
    if (b < 1) fail(ErrorKind::BadParams, "--B must be at least 1");
}

RngSpec root(const Common& common) { return RngSpec{common.seed, 0}; }

BootstrapConfig bootstrap(const Common& common, std::size_t replicates) {
    check_replicates(replicates);
    return BootstrapConfig{replicates, substream(root(common), kBootstrapStream), common.threads};
}

SubsetFamily family_for(const Common& common, std::size_t p, std::size_t q, std::size_t d,
                        const std::string& subsets_path) {
    if (!subsets_path.empty()) {
        std::ifstream in(subsets_path);
        if (!in) fail(ErrorKind::ParseError, "cannot open '" + subsets_path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::ParseError, "malformed subset family '" + subsets_path + "': " + e.what());
        }
        SubsetFamily fam = family_from_json(j);
        if (fam.p() != p) {
            fail(ErrorKind::DimensionMismatch, "subset family has p=" + std::to_string(fam.p()) +
                                                   " but the panel has " + std::to_string(p) + " columns");
        }
        return fam;
    }
    return build_family(p, q, d == 0 ? 2 * p : d, substream(root(common), kFamilyStream));
}

MethodTag sweep_method(const std::string& name) {
    if (name == "pool" || name == "SubsetsPool") return MethodTag::SubsetsPool;
    if (name == "naive" || name == "Naive") return MethodTag::Naive;
    if (name == "marginal" || name == "Marginal") return MethodTag::Marginal;
    fail(ErrorKind::Usage, "unknown method '" + name + "' (expected pool, naive or marginal)");
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, "cannot open '" + path + "'");
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, "malformed JSON in '" + path + "': " + e.what());
    }
}

// Two-column CSV "asset,sector" with a header row.
std::vector<std::string> read_sectors(const std::string& path, const std::vector<std::string>& names) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, "cannot open '" + path + "'");
    std::map<std::string, std::string> sector_of;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line_no == 1) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw CellError(ErrorKind::RaggedRows,
                            "sector file line " + std::to_string(line_no) + ": expected 'asset,sector'", line_no, 0);
        }
        sector_of[line.substr(0, comma)] = line.substr(comma + 1);
    }
    std::vector<std::string> sectors;
    for (const auto& name : names) {
        const auto it = sector_of.find(name);
        if (it == sector_of.end()) fail(ErrorKind::ShapeMismatch, "sector file has no entry for '" + name + "'");
        sectors.push_back(it->second);
    }
    return sectors;
}

Matrix column_major_to_panel(const std::vector<std::vector<double>>& columns, std::size_t rows) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        for (std::size_t i = 0; i < rows; ++i) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = columns[j][i];
        }
    }
    return m;
}

std::vector<double> column(const Matrix& m, Eigen::Index j) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, j);
    return out;
}

// ---- subcommands ----------------------------------------------------------

void cmd_pool_test(const Common& common, const PoolOptions& opt, std::ostream& out) {
    check_alpha(common.alpha);
    const io::NamedPanel panel = io::read_panel_csv(opt.in);
    const SubsetFamily fam = family_for(common, panel.data.cols(), opt.q, opt.d, opt.subsets);
    const TestResult r = pool_test(panel.data, fam, common.alpha, bootstrap(common, opt.replicates));
    emit(common, out, render(common, r));
}

void cmd_naive_test(const Common& common, const std::string& in, std::ostream& out) {
    check_alpha(common.alpha);
    const io::NamedPanel panel = io::read_panel_csv(in);
    emit(common, out, render(common, naive_test(panel.data, common.alpha)));
}

void cmd_marginal_test(const Common& common, const std::string& in, std::size_t replicates, std::ostream& out) {
    check_alpha(common.alpha);
    const io::NamedPanel panel = io::read_panel_csv(in);
    emit(common, out, render(common, marginal_test(panel.data, common.alpha, bootstrap(common, replicates))));
}

void cmd_simulate(const Common& common, const SimulateOptions& opt, const CLI::App& sub, std::ostream& out) {
    simlab::DgpSpec spec;
    if (!opt.config.empty()) spec = simlab::dgp_from_json(read_json(opt.config));
    const auto given = [&](const char* name) { return sub.count(name) > 0 || opt.config.empty(); };
    if (given("--model")) spec.model = simlab::model_from_string(opt.model);
    if (given("--n")) spec.n = opt.n;
    if (given("--p")) spec.p = opt.p;
    if (given("--p0")) spec.p0 = opt.p0;
    if (given("--alpha-n")) spec.alpha_n = opt.alpha_n;
    if (given("--alternative")) spec.under_null = !opt.alternative;
    if (given("--seed")) spec.rng = root(common);
    simlab::validate(spec);

    if (opt.dataset) {
        const DataMatrix x = simlab::generate(spec, spec.rng);
        std::vector<std::string> names;
        for (std::size_t j = 1; j <= spec.p; ++j) names.push_back("x" + std::to_string(j));
        std::ostringstream s;
        io::write_panel_csv(s, names, x.values());
        emit(common, out, s.str());
        return;
    }

    check_alpha(common.alpha);
    check_replicates(opt.replicates);
    simlab::SweepConfig cfg;
    cfg.q_grid = opt.q_grid;
    cfg.d_grid = opt.d_grid;
    cfg.alpha = common.alpha;
    cfg.replicates = opt.replicates;
    cfg.mc_reps = opt.mc_reps;
    cfg.threads = common.threads;
    cfg.methods.clear();
    for (const auto& m : opt.methods) cfg.methods.push_back(sweep_method(m));

    const simlab::SweepResult result = simlab::run_sweep(spec, cfg);
    if (common.format == "json") {
        emit(common, out, dump(nlohmann::json(result)));
    } else {
        std::ostringstream s;
        simlab::write_csv(s, result);
        emit(common, out, s.str());
    }
}

std::vector<backtest::NamedForecast> forecasts_from_history(const Common& common, const BacktestOptions& opt,
                                                            io::RawPanel& history, Matrix& returns) {
    if (opt.horizon < 2) fail(ErrorKind::Usage, "--horizon must be at least 2 when forecasting from --history");
    if (opt.refit_every < 1) fail(ErrorKind::Usage, "--refit-every must be at least 1");
    std::vector<VarMethod> methods;
    for (const auto& name : opt.methods) methods.push_back(VarMethod{var_kind_from_string(name), opt.evt_k});

    const auto rows = static_cast<std::size_t>(history.values.rows());
    const auto p = static_cast<std::size_t>(history.values.cols());
    for (Eigen::Index i = 0; i < history.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < history.values.cols(); ++j) {
            if (!std::isfinite(history.values(i, j))) {
                throw CellError(ErrorKind::NonFinite,
                                "history has a non-finite value at row " + std::to_string(i + 1) + ", column " +
                                    std::to_string(j + 1),
                                static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            }
        }
    }
    if (rows < opt.window + opt.horizon) {
        fail(ErrorKind::InsufficientHistory, "history has " + std::to_string(rows) + " rows; window + horizon = " +
                                                 std::to_string(opt.window + opt.horizon));
    }

    RollingConfig cfg;
    cfg.window = opt.window;
    cfg.horizon = opt.horizon;
    cfg.refit_every = opt.refit_every;
    cfg.theta = opt.theta0;

    // per_asset[j][m] = forecasts of method m for asset j.
    std::vector<std::vector<std::vector<double>>> per_asset(p);
    parallel_for(p, common.threads, [&](std::size_t j) {
        const std::vector<double> series = column(history.values, static_cast<Eigen::Index>(j));
        per_asset[j] = rolling_forecasts(series, cfg, methods);
    });

    std::vector<backtest::NamedForecast> out;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        std::vector<std::vector<double>> cols(p);
        for (std::size_t j = 0; j < p; ++j) cols[j] = per_asset[j][m];
        out.push_back({std::string(to_string(methods[m].kind)), column_major_to_panel(cols, opt.horizon)});
    }
    returns = history.values.bottomRows(static_cast<Eigen::Index>(opt.horizon));
    return out;
}

void cmd_backtest(const Common& common, const BacktestOptions& opt, std::ostream& out) {
    check_alpha(common.alpha);
    const bool from_history = !opt.history.empty();
    if (from_history == !opt.returns.empty()) {
        fail(ErrorKind::Usage, "backtest needs exactly one of --returns (with --forecast) or --history");
    }

    std::vector<std::string> names;
    Matrix returns;
    std::vector<backtest::NamedForecast> forecasts;
    if (from_history) {
        io::RawPanel history = io::read_raw_csv(opt.history);
        names = history.names;
        forecasts = forecasts_from_history(common, opt, history, returns);
        if (!opt.forecasts_out.empty()) {
            for (const auto& f : forecasts) {
                const std::string path = opt.forecasts_out + "_" + f.name + ".csv";
                std::ofstream file(path, std::ios::binary | std::ios::trunc);
                if (!file) fail(ErrorKind::ParseError, "cannot open '" + path + "' for writing");
                io::write_panel_csv(file, names, f.values);
            }
        }
    } else {
        if (opt.forecasts.empty()) fail(ErrorKind::Usage, "--returns requires at least one --forecast NAME=PATH");
        io::NamedPanel u = io::read_panel_csv(opt.returns);
        names = u.names;
        returns = u.data.values();
        for (const auto& spec : opt.forecasts) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
                fail(ErrorKind::Usage, "--forecast expects NAME=PATH, got '" + spec + "'");
            }
            io::RawPanel r = io::read_raw_csv(spec.substr(eq + 1));
            if (r.names != names) {
                fail(ErrorKind::ShapeMismatch, "forecast '" + spec.substr(0, eq) +
                                                   "' does not have the same columns as the returns panel");
            }
            forecasts.push_back({spec.substr(0, eq), std::move(r.values)});
        }
    }

    const DataMatrix u(returns);
    const SubsetFamily fam = family_for(common, u.cols(), opt.q, opt.d, "");
    const backtest::BacktestReport report =
        backtest::full_backtest(u, forecasts, opt.theta0, fam, common.alpha, bootstrap(common, opt.replicates));
    if (common.format == "json") {
        emit(common, out, dump(nlohmann::json(report)));
    } else {
        std::ostringstream s;
        backtest::write_report_csv(s, report);
        emit(common, out, s.str());
    }
}

void cmd_taildep(const Common& common, const TaildepOptions& opt, std::ostream& out) {
    const io::NamedPanel panel = io::read_panel_csv(opt.in);
    Matrix z = panel.data.values();
    if (opt.filter) {
        const std::size_t p = panel.data.cols();
        std::vector<std::vector<double>> residuals(p);
        parallel_for(p, common.threads, [&](std::size_t j) {
            const std::vector<double> series = column(z, static_cast<Eigen::Index>(j));
            residuals[j] = garch_fit(series).residuals;
        });
        z = column_major_to_panel(residuals, panel.data.rows());
    }
    const Matrix lambda = backtest::tail_dependence(DataMatrix(std::move(z)), opt.u);
    if (common.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < lambda.rows(); ++i) rows.push_back(column(lambda, i)  /* symmetric */);
        emit(common, out, dump({{"u", opt.u}, {"names", panel.names}, {"lambda", rows}}));
        return;
    }
    std::optional<std::vector<std::string>> sectors;
    if (!opt.sectors.empty()) sectors = read_sectors(opt.sectors, panel.names);
    std::ostringstream s;
    backtest::write_tail_dependence_csv(s, panel.names, lambda, sectors ? &*sectors : nullptr);
    emit(common, out, s.str());
}

void cmd_subsets_check(const Common& common, const SubsetsOptions& opt, std::ostream& out) {
    if (opt.q < 1 || opt.q >= opt.p) fail(ErrorKind::BadCardinality, "--q must satisfy 1 <= q < p");
    const IdentifiabilityReport report = verify_identifiability(opt.p, opt.q, opt.max_p);
    nlohmann::json j{{"p", opt.p},
                     {"q", opt.q},
                     {"gcd", gcd(opt.p, opt.q)},
                     {"identifiable", report.identifiable},
                     {"rank", report.rank}};
    j["witness"] = report.witness ? nlohmann::json(*report.witness) : nlohmann::json(nullptr);
    if (opt.d > 0) j["family"] = build_family(opt.p, opt.q, opt.d, substream(root(common), kFamilyStream));
    emit(common, out, dump(j));
}

// ---- option wiring --------------------------------------------------------

void add_common(CLI::App* sub, Common& common, const std::string& default_format, bool randomness, bool threads) {
    sub->add_option("--alpha", common.alpha, "Significance level (default 0.05)");
    if (randomness) sub->add_option("--seed", common.seed, "Root random seed (default 0)");
    if (threads) {
        sub->add_option("--threads", common.threads,
                        "Worker threads, 0 = all cores (default 1; env POOLMAX_THREADS). Results do not depend on it")
            ->envname("POOLMAX_THREADS");
    }
    common.format = default_format;
    sub->add_option("--format", common.format, "Output format: csv or json (default " + default_format + ")")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", common.out, "Output file (default: standard output)");
}

int exit_code(const Error& e) {
    switch (category(e.kind())) {
        case ErrorCategory::Usage: return kUsage;
        case ErrorCategory::Data: return kData;
        case ErrorCategory::Degenerate: return kDegenerate;
    }
    return kData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"poolmax: high-dimensional mean tests by subset pooling, with VaR backtesting tools", "poolmax"};
    app.require_subcommand(1, 1);
    app.failure_message(CLI::FailureMessage::help);

    // One Common per subcommand: each has its own default format.
    Common sim_c, pool_c, naive_c, marginal_c, bt_c, td_c, ss_c;
    PoolOptions pool;
    SimulateOptions sim;
    BacktestOptions bt;
    TaildepOptions td;
    SubsetsOptions ss;
    std::string naive_in;
    std::string marginal_in;
    std::size_t marginal_b = 1000;

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo size/power sweep over (q, d), or one simulated dataset");
    add_common(simulate, sim_c, "csv", true, true);
    simulate->add_option("--config", sim.config, "DGP config JSON; explicit flags override its fields");
    simulate->add_option("--model", sim.model, "Data-generating model A1, A2, B1 or B2 (default A1)")
        ->check(CLI::IsMember({"A1", "A2", "B1", "B2"}));
    simulate->add_option("--n", sim.n, "Observations per dataset (default 500)");
    simulate->add_option("--p", sim.p, "Dimension (default 100)");
    simulate->add_option("--p0", sim.p0, "Size of each deviating block (default 20)");
    simulate->add_option("--alpha-n", sim.alpha_n, "Tail weight of the B-model mixture (default 0.01)");
    simulate->add_flag("--alternative", sim.alternative, "Simulate under the alternative (default: null)");
    simulate->add_option("--q", sim.q_grid, "Subset sizes to sweep (default 49)")->delimiter(',');
    simulate->add_option("--d", sim.d_grid, "Family sizes to sweep (default 2p)")->delimiter(',');
    simulate->add_option("--B", sim.replicates, "Bootstrap replicates (default 1000)");
    simulate->add_option("--mc-reps", sim.mc_reps, "Monte Carlo replications (default 1000)");
    simulate->add_option("--methods", sim.methods, "Tests to run: pool, naive, marginal (default all)")
        ->delimiter(',');
    simulate->add_flag("--dataset", sim.dataset, "Write one simulated dataset as a CSV panel instead of sweeping");

    auto* pool_cmd = app.add_subcommand("pool-test", "Subsets-pooling max test with multiplier bootstrap");
    add_common(pool_cmd, pool_c, "json", true, true);
    pool_cmd->add_option("--in", pool.in, "Input panel CSV (header row of column names)")->required();
    pool_cmd->add_option("--q", pool.q, "Subset size; must be coprime with p (default 49)");
    pool_cmd->add_option("--d", pool.d, "Number of subsets, at least p (default 2p)");
    pool_cmd->add_option("--B", pool.replicates, "Bootstrap replicates (default 1000)");
    pool_cmd->add_option("--subsets", pool.subsets, "Subset family JSON to use instead of --q/--d");

    auto* naive_cmd = app.add_subcommand("naive-test", "Normal-calibrated test on full row sums");
    add_common(naive_cmd, naive_c, "json", false, false);
    naive_cmd->add_option("--in", naive_in, "Input panel CSV")->required();

    auto* marginal_cmd = app.add_subcommand("marginal-test", "Per-column max test without pooling");
    add_common(marginal_cmd, marginal_c, "json", true, true);
    marginal_cmd->add_option("--in", marginal_in, "Input panel CSV")->required();
    marginal_cmd->add_option("--B", marginal_b, "Bootstrap replicates (default 1000)");

    auto* bt_cmd = app.add_subcommand("backtest", "Validation and pairwise comparative VaR backtests (lower-triangle matrix)");
    add_common(bt_cmd, bt_c, "csv", true, true);
    bt_cmd->add_option("--returns", bt.returns, "Realised losses panel CSV");
    bt_cmd->add_option("--forecast", bt.forecasts, "Forecast panel as NAME=PATH (repeatable; +inf allowed)");
    bt_cmd->add_option("--history", bt.history, "Loss history CSV; forecasts are computed by rolling AR-GARCH fits");
    bt_cmd->add_option("--window", bt.window, "Rolling estimation window (default 3000)");
    bt_cmd->add_option("--horizon", bt.horizon, "Number of forecast days, taken from the end of --history");
    bt_cmd->add_option("--methods", bt.methods, "VaR methods: empirical, sstd, evt (default all)")->delimiter(',');
    bt_cmd->add_option("--refit-every", bt.refit_every, "Refit the GARCH model every N days (default 1)");
    bt_cmd->add_option("--evt-k", bt.evt_k, "Tail observations for the EVT estimator (default 50)");
    bt_cmd->add_option("--forecasts-out", bt.forecasts_out, "Also write forecast panels to PREFIX_<method>.csv");
    bt_cmd->add_option("--theta0", bt.theta0, "Target exceedance probability (default 0.01)");
    bt_cmd->add_option("--q", bt.q, "Subset size; must be coprime with p (default 49)");
    bt_cmd->add_option("--d", bt.d, "Number of subsets, at least p (default 2p)");
    bt_cmd->add_option("--B", bt.replicates, "Bootstrap replicates (default 1000)");

    auto* td_cmd = app.add_subcommand("taildep", "Empirical upper tail-dependence matrix");
    add_common(td_cmd, td_c, "csv", false, true);
    td_cmd->add_option("--in", td.in, "Residual (or loss) panel CSV")->required();
    td_cmd->add_option("--u", td.u, "Tail fraction, 0 < u < 0.5 with n*u >= 1 (default 0.01)");
    td_cmd->add_flag("--filter", td.filter, "Fit AR-GARCH per column and use the filtered residuals");
    td_cmd->add_option("--sectors", td.sectors, "CSV 'asset,sector' used to group the output rows");

    auto* ss_cmd = app.add_subcommand("subsets-check", "Exact identifiability check of the circular subset family");
    add_common(ss_cmd, ss_c, "json", true, false);
    ss_cmd->add_option("--p", ss.p, "Dimension")->required();
    ss_cmd->add_option("--q", ss.q, "Subset size")->required();
    ss_cmd->add_option("--d", ss.d, "Also print the family built with this d (default: not printed)");
    ss_cmd->add_option("--max-p", ss.max_p, "Largest p accepted by the exact check (default 64)");

    app.footer("Defaults: q=49, d=2p, B=1000, alpha=0.05, theta0=0.01. Exit codes: 0 ok, 2 usage, 3 data, "
               "4 degenerate statistic.");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        err << "poolmax: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (simulate->parsed()) cmd_simulate(sim_c, sim, *simulate, out);
        else if (pool_cmd->parsed()) cmd_pool_test(pool_c, pool, out);
        else if (naive_cmd->parsed()) cmd_naive_test(naive_c, naive_in, out);
        else if (marginal_cmd->parsed()) cmd_marginal_test(marginal_c, marginal_in, marginal_b, out);
        else if (bt_cmd->parsed()) cmd_backtest(bt_c, bt, out);
        else if (td_cmd->parsed()) cmd_taildep(td_c, td, out);
        else if (ss_cmd->parsed()) cmd_subsets_check(ss_c, ss, out);
    } catch (const Error& e) {
        err << "poolmax: error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        err << "poolmax: error: " << e.what() << '\n';
        return kData;
    }
    return kOk;
}

}  // namespace poolmax::cli
