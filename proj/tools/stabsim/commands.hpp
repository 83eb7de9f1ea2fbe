// Command implementations for the stabsim executable. Kept in a header so
// the test suite can drive them in-process.
#ifndef STABSIM_TOOLS_COMMANDS_HPP
#define STABSIM_TOOLS_COMMANDS_HPP

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <stabsim/stabsim.hpp>

namespace stabsim::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kThresholdFailure = 3 };

/// Series settings used by validate-cf unless overridden: small enough that
/// 10^4 paths at H = 0.5 finish in seconds on one core.
inline SeriesConfig validation_defaults() {
    SeriesConfig c;
    c.alpha = 1.0;
    c.hurst = 0.5;
    c.grid_points = 20;
    c.epsilon = 0.2;
    c.eta = 1.2;
    c.delta = 0.4;
    c.delta_prime = 0.45;
    c.beta = 0.4;
    c.c_p = 1.0;
    c.c_k = 0.02;
    return c;
}

namespace detail {

inline std::string num(double v) { return io::format_shortest(v); }

/// Metadata keys written into manifests that are not options.
inline bool is_metadata_key(const std::string& key) { return key == "command" || key == "version"; }

/**
 * Expands `--config FILE` into flags placed before the command-line ones, so
 * that with last-wins option policy the command line overrides the file.
 */
inline std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    if (args.empty()) return args;
    std::string path;
    for (std::size_t i = 1; i + 1 < args.size(); ++i)
        if (args[i] == "--config") path = args[i + 1];
    for (std::size_t i = 1; i < args.size(); ++i)
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    const io::KeyValues kv = io::parse_key_values(in);
    std::vector<std::string> out{args.front()};
    for (const auto& [key, value] : kv) {
        if (key == "command") {
            if (value != args.front())
                throw ConfigError("config file is for command '" + value + "', not '" + args.front() + "'");
            continue;
        }
        if (is_metadata_key(key)) continue;
        out.push_back("--" + key);
        out.push_back(value);
    }
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

/// Writes `<out>.manifest`: command, version, then the resolved options.
inline void write_manifest(const std::string& out_path, const std::string& command, const io::KeyValues& options) {
    io::KeyValues kv{{"command", command}, {"version", kVersion}};
    kv.insert(kv.end(), options.begin(), options.end());
    std::ofstream f(out_path + ".manifest", std::ios::binary);
    if (!f) throw ConfigError("cannot write manifest '" + out_path + ".manifest'");
    io::write_key_values(f, kv);
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write output '" + path + "'");
    return f;
}

inline void add_series_options(CLI::App* cmd, SeriesConfig& c) {
    cmd->add_option("--eta", c.eta, "accuracy exponent, > 1");
    cmd->add_option("--T", c.horizon, "time horizon");
    cmd->add_option("--grid", c.grid_points, "number of grid intervals");
    cmd->add_option("--q", c.q, "moment order, > max(p, 2)");
    cmd->add_option("--p", c.p, "L^p order, >= 1");
    cmd->add_option("--delta", c.delta, "kernel exponent, < 1/(2H) - 1/2");
    cmd->add_option("--delta-prime", c.delta_prime, "discretisation exponent, < H");
    cmd->add_option("--beta", c.beta, "tail exponent, < 1/alpha - 1/2");
    cmd->add_option("--cp", c.c_p, "truncation constant C_P");
    cmd->add_option("--ck", c.c_k, "bandwidth constant C_k");
    cmd->add_option("--max-points", c.max_points, "cap on fBm steps per term");
}

inline io::KeyValues series_manifest(const SeriesConfig& c) {
    return {{"alpha", num(c.alpha)},       {"hurst", num(c.hurst)},
            {"epsilon", num(c.epsilon)},   {"eta", num(c.eta)},
            {"T", num(c.horizon)},         {"grid", std::to_string(c.grid_points)},
            {"q", num(c.q)},               {"p", num(c.p)},
            {"delta", num(c.delta)},       {"delta-prime", num(c.delta_prime)},
            {"beta", num(c.beta)},         {"cp", num(c.c_p)},
            {"ck", num(c.c_k)},            {"max-points", std::to_string(c.max_points)}};
}

inline LocationDensity parse_density(const std::string& name) {
    if (name == "laplace") return LocationDensity::laplace;
    if (name == "gaussian") return LocationDensity::gaussian;
    throw ConfigError("unknown density '" + name + "' (laplace or gaussian)");
}

} // namespace detail

/**
 * Runs one command. `args` excludes the program name, e.g.
 * {"bounds", "--alpha", "1", "--q", "2", "--N", "5"}.
 * Returns 0 on success, 2 on configuration errors, 3 when a validation
 * threshold is missed.
 */
inline int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Shot-noise simulation of local time fractional stable motion"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", std::string(kVersion));
    std::string config_path;
    std::function<int()> action;

    // simulate
    SeriesConfig sim_cfg;
    sim_cfg.alpha = 1.2;
    sim_cfg.hurst = 0.3;
    std::uint64_t sim_seed = 0;
    std::string sim_out = "ltfsm_path.csv";
    std::string sim_density = "laplace";
    auto* sim = app.add_subcommand("simulate", "simulate one LTFSM sample path to CSV");
    sim->add_option("--alpha", sim_cfg.alpha, "stability index in (0, 2)")->required();
    sim->add_option("--hurst", sim_cfg.hurst, "Hurst index in (0, 1)")->required();
    sim->add_option("--epsilon", sim_cfg.epsilon, "target accuracy")->required();
    sim->add_option("--seed", sim_seed, "random seed")->required();
    detail::add_series_options(sim, sim_cfg);
    sim->add_option("--density", sim_density, "location density: laplace or gaussian");
    sim->add_option("--out", sim_out, "output CSV path");
    sim->add_option("--config", config_path, "key = value file; flags override it");
    sim->callback([&] {
        action = [&] {
            const TuningParams params = tune(sim_cfg);
            const LocationDensity density = detail::parse_density(sim_density);
            const SamplePath path = simulate_ltfsm(sim_cfg, params, RandomStream(sim_seed, 0), density);
            {
                auto f = detail::open_output(sim_out);
                const std::vector<std::string> header{"t", "value"};
                const std::vector<std::span<const double>> cols{path.times, path.values};
                io::write_csv(f, header, cols);
            }
            io::KeyValues m = detail::series_manifest(sim_cfg);
            m.emplace_back("density", sim_density);
            m.emplace_back("seed", std::to_string(sim_seed));
            m.emplace_back("out", sim_out);
            detail::write_manifest(sim_out, "simulate", m);
            out << "P = " << params.P << "\nk = " << params.k << "\nout = " << sim_out << '\n';
            return static_cast<int>(kOk);
        };
    });

    // bounds
    BoundInputs bnd;
    std::size_t bnd_P = 0;
    double bnd_beta = 0.0, bnd_p = 0.0;
    std::string bnd_out = "bounds.txt";
    auto* bounds = app.add_subcommand("bounds", "moment bounds for the truncated series");
    bounds->add_option("--alpha", bnd.alpha, "stability index in (0, 2)")->required();
    bounds->add_option("--q", bnd.q, "moment order, >= 2")->required();
    bounds->add_option("--N", bnd.N, "truncation index, > q/alpha - 1")->required();
    bounds->add_option("--Mq", bnd.M_q, "moment bound M_q");
    auto* p_opt = bounds->add_option("--P", bnd_P, "second truncation index for the approximation bound");
    auto* beta_opt = bounds->add_option("--beta", bnd_beta, "decay exponent for the approximation bound");
    bounds->add_option("--Mqk", bnd.M_qk, "moment bound M_{q,k}");
    auto* lp_opt = bounds->add_option("--p", bnd_p, "L^p order for the integrated bounds");
    bounds->add_option("--volK", bnd.vol_K, "volume of the time domain");
    bounds->add_option("--out", bnd_out, "report path");
    bounds->add_option("--config", config_path, "key = value file; flags override it");
    bounds->callback([&] {
        action = [&] {
            if (p_opt->count() != beta_opt->count())
                throw ConfigError("--P and --beta must be given together");
            if (p_opt->count()) {
                bnd.P = bnd_P;
                bnd.beta = bnd_beta;
            }
            if (lp_opt->count()) bnd.p = bnd_p;
            const BoundReport r = make_bound_report(bnd);
            io::KeyValues lines{{"alpha", detail::num(r.alpha)},
                                {"q", detail::num(r.q)},
                                {"N", std::to_string(r.N)},
                                {"B_q", detail::num(r.B_q)},
                                {"H_N+1_q", detail::num(r.H_Nplus1_q)},
                                {"A_q", detail::num(r.A_q)},
                                {"M_q", detail::num(r.M_q)},
                                {"truncation_bound", detail::num(r.truncation_bound)}};
            if (r.approximation_bound) {
                lines.emplace_back("P", std::to_string(bnd_P));
                lines.emplace_back("beta", detail::num(bnd_beta));
                lines.emplace_back("A_prime_q", detail::num(*r.A_prime_q));
                lines.emplace_back("M_qk", detail::num(*r.M_qk));
                lines.emplace_back("approximation_bound", detail::num(*r.approximation_bound));
            }
            if (r.truncation_bound_lp) {
                lines.emplace_back("p", detail::num(bnd_p));
                lines.emplace_back("volK", detail::num(bnd.vol_K));
                lines.emplace_back("truncation_bound_lp", detail::num(*r.truncation_bound_lp));
                if (r.approximation_bound_lp)
                    lines.emplace_back("approximation_bound_lp", detail::num(*r.approximation_bound_lp));
            }
            io::write_key_values(out, lines);
            {
                auto f = detail::open_output(bnd_out);
                io::write_key_values(f, lines);
            }
            io::KeyValues m{{"alpha", detail::num(bnd.alpha)},
                            {"q", detail::num(bnd.q)},
                            {"N", std::to_string(bnd.N)},
                            {"Mq", detail::num(bnd.M_q)},
                            {"Mqk", detail::num(bnd.M_qk)},
                            {"volK", detail::num(bnd.vol_K)}};
            if (p_opt->count()) {
                m.emplace_back("P", std::to_string(bnd_P));
                m.emplace_back("beta", detail::num(bnd_beta));
            }
            if (lp_opt->count()) m.emplace_back("p", detail::num(bnd_p));
            m.emplace_back("out", bnd_out);
            detail::write_manifest(bnd_out, "bounds", m);
            return static_cast<int>(kOk);
        };
    });

    // validate-cf
    SeriesConfig cf_cfg = validation_defaults();
    std::uint64_t cf_seed = 0;
    std::size_t cf_paths = 10000;
    std::size_t cf_steps = 10000;
    double cf_u = 1.0;
    std::string cf_method = "series";
    std::string cf_out = "cf.csv";
    double cf_threshold = -1.0;
    auto* vcf = app.add_subcommand("validate-cf", "check that log|E exp(iuY(t))| is linear in t (alpha = 1)");
    vcf->add_option("--alpha", cf_cfg.alpha, "stability index; must be 1")->required();
    vcf->add_option("--hurst", cf_cfg.hurst, "Hurst index")->required();
    vcf->add_option("--paths", cf_paths, "Monte Carlo replicates, >= 2")->required();
    vcf->add_option("--seed", cf_seed, "random seed")->required();
    vcf->add_option("--method", cf_method, "series or rwrr");
    vcf->add_option("--u", cf_u, "frequency");
    vcf->add_option("--steps", cf_steps, "random walk steps (rwrr)");
    vcf->add_option("--epsilon", cf_cfg.epsilon, "target accuracy (series)");
    detail::add_series_options(vcf, cf_cfg);
    vcf->add_option("--threshold", cf_threshold, "minimum R^2 (default 0.99 series, 0.95 rwrr)");
    vcf->add_option("--out", cf_out, "output CSV path");
    vcf->add_option("--config", config_path, "key = value file; flags override it");
    vcf->callback([&] {
        action = [&] {
            if (cf_cfg.alpha != 1.0)
                throw ConfigError("validate-cf requires --alpha 1: the closed form exp(C|u|t) of the "
                                  "characteristic function holds only for alpha = 1");
            if (cf_paths < 2) throw ConfigError("validate-cf needs at least 2 replicates (--paths)");
            const bool rwrr = cf_method == "rwrr";
            if (!rwrr && cf_method != "series") throw ConfigError("unknown method '" + cf_method + "' (series or rwrr)");
            if (rwrr && cf_cfg.hurst != 0.5) throw ConfigError("the random walk baseline exists only for --hurst 0.5");
            const double threshold = cf_threshold >= 0.0 ? cf_threshold : (rwrr ? 0.95 : 0.99);
            const auto grid = uniform_grid(cf_cfg.horizon, cf_cfg.grid_points);

            PathMatrix paths;
            if (rwrr) {
                paths = run_replicates(cf_paths, grid.size(), cf_seed, [&](RandomStream s) {
                    return simulate_rwrr_baseline(cf_cfg.alpha, cf_steps, cf_cfg.horizon, cf_cfg.grid_points, s).values;
                });
            } else {
                const TuningParams params = tune(cf_cfg);
                paths = run_replicates(cf_paths, grid.size(), cf_seed,
                                       [&](RandomStream s) { return simulate_ltfsm(cf_cfg, params, s).values; });
            }
            const CfEstimate cf = empirical_cf(paths, grid, cf_u);
            const LinearFit fit = cf_log_linearity(cf);
            {
                auto f = detail::open_output(cf_out);
                std::vector<double> t, logmod, se;
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    if (!(grid[i] > 0.0)) continue;
                    t.push_back(grid[i]);
                    logmod.push_back(std::log(cf.modulus(i)));
                    se.push_back(cf.stderr_modulus[i] / cf.modulus(i));
                }
                const std::vector<std::string> header{"t", "log_modulus", "stderr"};
                const std::vector<std::span<const double>> cols{t, logmod, se};
                io::write_csv(f, header, cols);
            }
            io::KeyValues m{{"alpha", detail::num(cf_cfg.alpha)}, {"hurst", detail::num(cf_cfg.hurst)},
                            {"paths", std::to_string(cf_paths)},  {"seed", std::to_string(cf_seed)},
                            {"method", cf_method},                {"u", detail::num(cf_u)}};
            if (rwrr) {
                m.emplace_back("steps", std::to_string(cf_steps));
                m.emplace_back("T", detail::num(cf_cfg.horizon));
                m.emplace_back("grid", std::to_string(cf_cfg.grid_points));
            } else {
                for (auto& kv : detail::series_manifest(cf_cfg))
                    if (kv.first != "alpha" && kv.first != "hurst") m.push_back(kv);
            }
            m.emplace_back("threshold", detail::num(threshold));
            m.emplace_back("out", cf_out);
            detail::write_manifest(cf_out, "validate-cf", m);
            const bool pass = fit.r2 >= threshold;
            out << "method = " << cf_method << "\nslope = " << detail::num(fit.slope)
                << "\nintercept = " << detail::num(fit.intercept) << "\nr2 = " << detail::num(fit.r2)
                << "\nthreshold = " << detail::num(threshold) << "\npass = " << (pass ? "true" : "false") << '\n';
            return static_cast<int>(pass ? kOk : kThresholdFailure);
        };
    });

    // stable-check
    double sc_alpha = 1.2;
    std::size_t sc_terms = 10000, sc_samples = 10000;
    std::uint64_t sc_seed = 0;
    double sc_threshold = 0.02;
    std::string sc_out = "stable_check.txt";
    auto* sc = app.add_subcommand("stable-check", "compare truncated LePage sums with a direct stable sampler");
    sc->add_option("--alpha", sc_alpha, "stability index in (0, 2)")->required();
    sc->add_option("--terms", sc_terms, "series terms per sample")->required();
    sc->add_option("--samples", sc_samples, "number of samples")->required();
    sc->add_option("--seed", sc_seed, "random seed")->required();
    sc->add_option("--threshold", sc_threshold, "maximum KS distance");
    sc->add_option("--out", sc_out, "report path");
    sc->add_option("--config", config_path, "key = value file; flags override it");
    sc->callback([&] {
        action = [&] {
            if (!(sc_alpha > 0.0 && sc_alpha < 2.0)) throw ConfigError("stable-check requires 0 < alpha < 2");
            if (sc_terms < 1) throw ConfigError("stable-check needs --terms >= 1");
            if (sc_samples < 2) throw ConfigError("stable-check needs --samples >= 2");
            const std::vector<std::size_t> checkpoint{sc_terms};
            const PathMatrix draws = run_replicates(sc_samples, 2, sc_seed, [&](RandomStream s) {
                RandomStream series = s.child(0);
                RandomStream direct = s.child(1);
                const double x = lepage_partial_sums(sc_alpha, checkpoint, series).front();
                return std::vector<double>{x, oracle::sample_stable(sc_alpha, direct)};
            });
            const std::vector<double> series = draws.column(0);
            const std::vector<double> direct = draws.column(1);
            const double scale = fit_scale_by_cf(series, sc_alpha);
            std::vector<double> scaled(series.size());
            for (std::size_t i = 0; i < series.size(); ++i) scaled[i] = series[i] / scale;
            const double ks = ks_distance(scaled, direct);
            const bool pass = ks <= sc_threshold;
            const io::KeyValues lines{{"alpha", detail::num(sc_alpha)},
                                      {"terms", std::to_string(sc_terms)},
                                      {"samples", std::to_string(sc_samples)},
                                      {"fitted_scale", detail::num(scale)},
                                      {"theoretical_scale", detail::num(lepage_stable_scale(sc_alpha))},
                                      {"ks", detail::num(ks)},
                                      {"threshold", detail::num(sc_threshold)},
                                      {"pass", pass ? "true" : "false"}};
            io::write_key_values(out, lines);
            {
                auto f = detail::open_output(sc_out);
                io::write_key_values(f, lines);
            }
            const io::KeyValues m{{"alpha", detail::num(sc_alpha)},     {"terms", std::to_string(sc_terms)},
                                  {"samples", std::to_string(sc_samples)}, {"seed", std::to_string(sc_seed)},
                                  {"threshold", detail::num(sc_threshold)}, {"out", sc_out}};
            detail::write_manifest(sc_out, "stable-check", m);
            return static_cast<int>(pass ? kOk : kThresholdFailure);
        };
    });

    try {
        std::vector<std::string> args = detail::expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? static_cast<int>(kOk) : static_cast<int>(kConfigError);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    try {
        return action();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

} // namespace stabsim::cli

#endif // STABSIM_TOOLS_COMMANDS_HPP
