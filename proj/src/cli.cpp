#include "dfrcsg/cli.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dfrcsg/config.hpp"
#include "dfrcsg/metrics.hpp"
#include "dfrcsg/montecarlo.hpp"
#include "dfrcsg/optimize.hpp"
#include "dfrcsg/parallel.hpp"

namespace dfrcsg::cli {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// "a:b:c" -> start:stop:step grid (dB or plain units); scalar -> one value
std::vector<double> parse_grid(const std::string& text) {
    if (text.empty()) return {};
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) return {std::stod(text)};
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw CLI::ValidationError("grid", "expected start:stop:step");
    const double start = std::stod(text.substr(0, c1));
    const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(text.substr(c2 + 1));
    if (!(step > 0.0)) throw CLI::ValidationError("grid", "step must be positive");
    std::vector<double> out;
    const long n = std::lround(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

struct CommonArgs {
    std::string config_path;
    std::string metrics_csv;
    std::string theta_db, theta_p_db, gamma_dbm, pfa, eta;
    std::string ic_mode;
    double ic_a = 2.0, ic_b = 4.0;
    bool ic_at_radar = true, ic_at_comm = true;
    long n = 100'000;
    std::uint64_t seed = 1;
    bool exact_ci = false;
    std::string radar_sampling = "rejection";
    std::string out_path;
    bool json = false;
    bool dump_cdf = false;
    bool no_cache = false;
    double pass = 0.01;
    double tol = 1e-5;
    double max_eta = 20.0;
};

void add_scenario_options(CLI::App* sub, CommonArgs* a) {
    sub->add_option("--config", a->config_path, "scenario config file (JSON)");
    sub->add_option("--ic", a->ic_mode, "interference cancellation: none|partial|perfect");
    sub->add_option("--a", a->ic_a, "partial cancellation parameter a");
    sub->add_option("--b", a->ic_b, "partial cancellation parameter b");
    sub->add_option("--at-radar", a->ic_at_radar, "perfect cancellation at the radar receiver");
    sub->add_option("--at-comm", a->ic_at_comm, "perfect cancellation at the comm receiver");
    sub->add_option("--tol", a->tol, "quadrature tolerance")->check(CLI::PositiveNumber);
}

void add_metric_options(CLI::App* sub, CommonArgs* a) {
    sub->add_option("--metric,--metrics", a->metrics_csv, "metric name(s), comma separated");
    sub->add_option("--theta-db", a->theta_db, "comm SIR threshold, dB (scalar or start:stop:step)");
    sub->add_option("--theta-p-db", a->theta_p_db, "radar SIR threshold, dB (scalar or range)");
    sub->add_option("--gamma-dbm", a->gamma_dbm, "detector threshold, dBm (scalar or range)");
    sub->add_option("--pfa", a->pfa, "false-alarm target(s); selects gamma via the analytic curve");
    sub->add_option("--eta", a->eta, "spectral efficiency threshold(s), bit/s/Hz");
    sub->add_option("--max-eta", a->max_eta, "avg_rate truncation (bit/s/Hz)");
    sub->add_option("--out", a->out_path, "output file (default stdout)");
    sub->add_flag("--json", a->json, "emit JSON instead of CSV");
    sub->add_flag("--dump-cdf", a->dump_cdf, "also dump the interference CDF table (needs --out)");
    sub->add_flag("--no-cache", a->no_cache, "invert the LT per query instead of using the table");
}

SimulatorOptions simulator_options(const CommonArgs& a) {
    SimulatorOptions so;
    so.exact_ci = a.exact_ci;
    if (a.radar_sampling == "inverse") so.radar_sampling = RadarRangeSampling::inverse_cdf;
    else if (a.radar_sampling != "rejection")
        throw ConfigError("--radar-sampling must be rejection|inverse");
    return so;
}

ResidualModel resolve_ic(const CommonArgs& a, const ResidualModel& from_config) {
    if (a.ic_mode.empty()) return from_config;
    if (a.ic_mode == "none") return ResidualModel::none();
    if (a.ic_mode == "partial") return ResidualModel::partial(a.ic_a, a.ic_b);
    if (a.ic_mode == "perfect") return ResidualModel::perfect(a.ic_at_radar, a.ic_at_comm);
    throw ConfigError("--ic must be none|partial|perfect");
}

LoadedConfig resolve_config(const CommonArgs& a) {
    LoadedConfig cfg;
    if (!a.config_path.empty()) {
        cfg = load_config_file(a.config_path);
    } else {
        cfg.params = ScenarioParams::defaults();
        cfg.defaults_applied = {"all"};
    }
    cfg.ic = resolve_ic(a, cfg.ic);
    return cfg;
}

struct Task {
    MetricKind kind;
    Thresholds th;
    double theta_db = std::nan("");
    double theta_p_db = std::nan("");
    double gamma_dbm = std::nan("");
};

std::vector<MetricKind> parse_metric_list(const std::string& csv) {
    std::vector<MetricKind> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto k = parse_metric(item);
        if (!k) throw ConfigError("unknown metric: '" + item + "'");
        out.push_back(*k);
    }
    if (out.empty()) throw ConfigError("no metric given (use --metrics)");
    return out;
}

// expand the requested metrics over the threshold grids, in grid order
std::vector<Task> build_tasks(const CommonArgs& a, const MetricEvaluator* ev,
                              const ResidualModel& model) {
    const auto metrics = parse_metric_list(a.metrics_csv);
    const auto thetas = parse_grid(a.theta_db);
    const auto theta_ps = parse_grid(a.theta_p_db);
    const auto etas = parse_grid(a.eta);

    // gamma axis: explicit dBm values, or false-alarm targets mapped
    // through the analytic threshold-selection curve
    std::vector<std::pair<double, double>> gammas;  // (gamma W, gamma dBm)
    for (double g_dbm : parse_grid(a.gamma_dbm)) gammas.emplace_back(dbm_to_watt(g_dbm), g_dbm);
    if (!a.pfa.empty()) {
        if (!gammas.empty()) throw ConfigError("give either --gamma-dbm or --pfa, not both");
        if (!ev) throw ConfigError("--pfa requires the analytic engine");
        for (double target : parse_grid(a.pfa)) {
            const double g = ev->fa_threshold(target, model);
            gammas.emplace_back(g, g > 0.0 ? watt_to_dbm(g) : -std::numeric_limits<double>::infinity());
        }
    }

    std::vector<Task> tasks;
    for (MetricKind kind : metrics) {
        const bool want_theta = needs_theta(kind);
        const bool want_tp = needs_theta_prime(kind);
        const bool want_gamma = needs_gamma(kind);
        const bool want_eta = needs_eta(kind);
        if (want_theta && thetas.empty()) throw ConfigError(std::string(to_string(kind)) + ": needs --theta-db");
        if (want_tp && theta_ps.empty()) throw ConfigError(std::string(to_string(kind)) + ": needs --theta-p-db");
        if (want_gamma && gammas.empty()) throw ConfigError(std::string(to_string(kind)) + ": needs --gamma-dbm or --pfa");
        if (want_eta && etas.empty()) throw ConfigError(std::string(to_string(kind)) + ": needs --eta");

        auto loop_eta = [&](Task t) {
            if (!want_eta) { tasks.push_back(t); return; }
            for (double e : etas) {
                t.th.eta = e;
                t.theta_db = linear_to_db(std::exp2(e) - 1.0);
                tasks.push_back(t);
            }
        };
        auto loop_gamma = [&](Task t) {
            if (!want_gamma) { loop_eta(t); return; }
            for (const auto& [g_w, g_dbm] : gammas) {
                t.th.gamma = g_w;
                t.gamma_dbm = g_dbm;
                loop_eta(t);
            }
        };
        auto loop_tp = [&](Task t) {
            if (!want_tp) { loop_gamma(t); return; }
            for (double tp : theta_ps) {
                t.th.theta_prime = db_to_linear(tp);
                t.theta_p_db = tp;
                loop_gamma(t);
            }
        };
        Task base;
        base.kind = kind;
        if (want_theta) {
            for (double th : thetas) {
                Task t = base;
                t.th.theta = db_to_linear(th);
                t.theta_db = th;
                loop_tp(t);
            }
        } else {
            loop_tp(base);
        }
    }
    return tasks;
}

struct OutputWriter {
    std::ostringstream body;
    bool json = false;
    nlohmann::json rows = nlohmann::json::array();

    void comment(const std::string& line) {
        if (!json) body << "# " << line << "\n";
    }
    void header(const std::vector<std::string>& cols) {
        if (json) return;
        for (std::size_t i = 0; i < cols.size(); ++i) body << (i ? "," : "") << cols[i];
        body << "\n";
    }
    void row(const std::vector<std::pair<std::string, std::string>>& fields) {
        if (json) {
            nlohmann::json r;
            for (const auto& [k, v] : fields) r[k] = v;
            rows.push_back(r);
            return;
        }
        for (std::size_t i = 0; i < fields.size(); ++i) body << (i ? "," : "") << fields[i].second;
        body << "\n";
    }
    std::string str() {
        if (json) return rows.dump(2) + "\n";
        return body.str();
    }
};

std::string opt_field(double v) { return std::isnan(v) ? "" : fmt(v); }

void emit(const CommonArgs& a, OutputWriter& w) {
    const std::string text = w.str();
    if (a.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(a.out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write output file: " + a.out_path);
    f << text;
}

void write_manifest(const CommonArgs& a, const LoadedConfig& cfg, const ResidualModel& model,
                    const std::string& subcommand, const MetricEvaluator* ev,
                    const Simulator* sim) {
    if (a.out_path.empty()) return;
    nlohmann::json m;
    m["tool"] = "dfrcsg";
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["seed"] = a.seed;
    m["n"] = a.n;
    m["tolerances"] = {{"quad_tol", a.tol}, {"gp_tol", a.tol * 0.1}, {"table_tol", a.tol},
                       {"tail_eps", 1e-8}, {"pass", a.pass}};
    m["resolved_config"] = resolved_config_json(cfg.params, model);
    m["defaults_applied"] = cfg.defaults_applied;
    if (ev) m["comm_truncation_radius_m"] = ev->distributions().comm_truncation_radius(1e-8);
    if (sim) m["mc_truncation_radius_m"] = sim->truncation_radius();
    char ts[32];
    std::time_t now = std::time(nullptr);
    std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    m["generated_at"] = ts;
    std::ofstream f(a.out_path + ".manifest.json");
    if (f) f << m.dump(2) << "\n";
}

void scenario_comments(OutputWriter& w, const CommonArgs& a, const LoadedConfig& cfg) {
    w.comment(std::string("dfrcsg v") + kVersion);
    const bool fc_default =
        a.config_path.empty() ||
        std::find(cfg.defaults_applied.begin(), cfg.defaults_applied.end(), "f_c") !=
            cfg.defaults_applied.end();
    const bool rmax_default =
        a.config_path.empty() ||
        std::find(cfg.defaults_applied.begin(), cfg.defaults_applied.end(), "r_Rmax") !=
            cfg.defaults_applied.end();
    w.comment("f_c_hz=" + fmt(cfg.params.f_c) + (fc_default ? " (default)" : ""));
    w.comment("r_rmax_m=" + fmt(cfg.params.r_rmax) + (rmax_default ? " (default)" : ""));
}

MetricOptions metric_options(const CommonArgs& a) {
    MetricOptions mo;
    mo.quad_tol = a.tol;
    mo.table_tol = a.tol;
    mo.gp_tol = std::min(1e-6, a.tol * 0.1);
    mo.use_cdf_table = !a.no_cache;
    return mo;
}

void maybe_dump_cdf(const CommonArgs& a, const MetricEvaluator& ev) {
    if (!a.dump_cdf) return;
    if (a.out_path.empty()) throw ConfigError("--dump-cdf needs --out");
    if (a.no_cache) throw ConfigError("--dump-cdf is incompatible with --no-cache");
    std::ofstream f(a.out_path + ".cdf.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write CDF dump");
    ev.cdf_table().dump_csv(f);
}

MetricEstimate analytic_point(const MetricEvaluator& ev, const Task& t, const CommonArgs& a,
                              const ResidualModel& model) {
    if (t.kind == MetricKind::avg_rate) return ev.average_rate(a.max_eta, model);
    return ev.evaluate(t.kind, t.th, model);
}

int run_analytic(const CommonArgs& a, const std::string& name) {
    const LoadedConfig cfg = resolve_config(a);
    const ValidatedScenario scenario = validate(cfg.params);
    const ResidualModel model = cfg.ic;
    MetricEvaluator ev(scenario, metric_options(a));
    const auto tasks = build_tasks(a, &ev, model);

    std::vector<MetricEstimate> results(tasks.size());
    parallel_for(static_cast<long>(tasks.size()), [&](long i) {
        results[static_cast<std::size_t>(i)] =
            analytic_point(ev, tasks[static_cast<std::size_t>(i)], a, model);
    });

    OutputWriter w;
    w.json = a.json;
    scenario_comments(w, a, cfg);
    w.header({"metric", "theta_db", "theta_p_db", "gamma", "value", "error"});
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& t = tasks[i];
        w.row({{"metric", to_string(t.kind)},
               {"theta_db", opt_field(t.theta_db)},
               {"theta_p_db", opt_field(t.theta_p_db)},
               {"gamma", opt_field(t.gamma_dbm)},
               {"value", fmt(results[i].value)},
               {"error", fmt(results[i].error_bound)}});
    }
    emit(a, w);
    maybe_dump_cdf(a, ev);
    write_manifest(a, cfg, model, name, &ev, nullptr);
    return 0;
}

int run_mc(const CommonArgs& a) {
    const LoadedConfig cfg = resolve_config(a);
    const ValidatedScenario scenario = validate(cfg.params);
    const ResidualModel model = cfg.ic;
    Simulator sim(scenario, simulator_options(a));

    // gamma-from-pfa needs the analytic threshold-selection curve
    std::optional<MetricEvaluator> ev;
    if (!a.pfa.empty()) ev.emplace(scenario, metric_options(a));
    const auto tasks = build_tasks(a, ev ? &*ev : nullptr, model);

    OutputWriter w;
    w.json = a.json;
    scenario_comments(w, a, cfg);
    w.comment("seed=" + std::to_string(a.seed) + " n=" + std::to_string(a.n));
    w.header({"metric", "theta_db", "theta_p_db", "gamma", "value", "ci", "n", "seed"});
    for (const Task& t : tasks) {
        const McEstimate est = sim.estimate(t.kind, t.th, model, a.n, a.seed);
        w.row({{"metric", to_string(t.kind)},
               {"theta_db", opt_field(t.theta_db)},
               {"theta_p_db", opt_field(t.theta_p_db)},
               {"gamma", opt_field(t.gamma_dbm)},
               {"value", fmt(est.value)},
               {"ci", fmt(est.half_width)},
               {"n", std::to_string(est.n)},
               {"seed", std::to_string(est.seed)}});
    }
    emit(a, w);
    write_manifest(a, cfg, model, "mc", ev ? &*ev : nullptr, &sim);
    return 0;
}

int run_validate(const CommonArgs& a) {
    const LoadedConfig cfg = resolve_config(a);
    const ValidatedScenario scenario = validate(cfg.params);
    const ResidualModel model = cfg.ic;
    MetricEvaluator ev(scenario, metric_options(a));
    Simulator sim(scenario, simulator_options(a));
    const auto tasks = build_tasks(a, &ev, model);

    std::vector<MetricEstimate> analytic(tasks.size());
    parallel_for(static_cast<long>(tasks.size()), [&](long i) {
        analytic[static_cast<std::size_t>(i)] =
            analytic_point(ev, tasks[static_cast<std::size_t>(i)], a, model);
    });

    OutputWriter w;
    w.json = a.json;
    scenario_comments(w, a, cfg);
    w.comment("seed=" + std::to_string(a.seed) + " n=" + std::to_string(a.n) +
              " pass=" + fmt(a.pass));
    w.header({"metric", "theta_db", "theta_p_db", "gamma", "analytic", "mc", "ci", "abs_diff", "pass"});
    bool all_pass = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& t = tasks[i];
        const McEstimate mc = sim.estimate(t.kind, t.th, model, a.n, a.seed);
        const double diff = std::abs(analytic[i].value - mc.value);
        worst = std::max(worst, diff);
        const bool ok = diff <= a.pass;
        all_pass = all_pass && ok;
        w.row({{"metric", to_string(t.kind)},
               {"theta_db", opt_field(t.theta_db)},
               {"theta_p_db", opt_field(t.theta_p_db)},
               {"gamma", opt_field(t.gamma_dbm)},
               {"analytic", fmt(analytic[i].value)},
               {"mc", fmt(mc.value)},
               {"ci", fmt(mc.half_width)},
               {"abs_diff", fmt(diff)},
               {"pass", ok ? "1" : "0"}});
    }
    emit(a, w);
    maybe_dump_cdf(a, ev);
    write_manifest(a, cfg, model, "validate", &ev, &sim);
    std::cerr << "validate: max |analytic - mc| = " << fmt(worst) << " (pass threshold " << fmt(a.pass)
              << ") -> " << (all_pass ? "OK" : "FAIL") << "\n";
    return all_pass ? 0 : 3;
}

int run_optimize(const CommonArgs& a, const PowerBox& box, bool no_ratio_reduction) {
    const LoadedConfig cfg = resolve_config(a);
    validate(cfg.params);  // fail early with a clear message
    const ResidualModel model = cfg.ic;
    const auto thetas = parse_grid(a.theta_db);
    const auto theta_ps = parse_grid(a.theta_p_db);
    if (thetas.size() != 1 || theta_ps.size() != 1)
        throw ConfigError("optimize: needs scalar --theta-db and --theta-p-db");

    std::vector<SurfacePoint> surface;
    const PowerOptimum opt =
        optimize_powers(cfg.params, db_to_linear(theta_ps[0]), db_to_linear(thetas[0]), box, model,
                        metric_options(a), !no_ratio_reduction, &surface);

    OutputWriter w;
    w.json = a.json;
    scenario_comments(w, a, cfg);
    w.comment("optimum pl_dbm=" + fmt(opt.p_l_dbm) + " pv_dbm=" + fmt(opt.p_v_dbm) +
              " jrsccp=" + fmt(opt.value));
    w.header({"pl_dbm", "pv_dbm", "jrsccp"});
    for (const SurfacePoint& s : surface)
        w.row({{"pl_dbm", fmt(s.p_l_dbm)}, {"pv_dbm", fmt(s.p_v_dbm)}, {"jrsccp", fmt(s.value)}});
    emit(a, w);
    write_manifest(a, cfg, model, "optimize", nullptr, nullptr);
    std::cerr << "optimize: best jrsccp=" << fmt(opt.value) << " at P_L=" << fmt(opt.p_l_dbm)
              << " dBm, P_V=" << fmt(opt.p_v_dbm) << " dBm (" << opt.evaluations << " evaluations)\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"joint radar-communication performance metrics for a two-lane vehicular scenario"};
    app.require_subcommand(1);

    CommonArgs a;
    PowerBox box;
    bool no_ratio_reduction = false;

    CLI::App* analytic = app.add_subcommand("analytic", "evaluate metrics analytically");
    CLI::App* mc = app.add_subcommand("mc", "estimate metrics by Monte-Carlo simulation");
    CLI::App* val = app.add_subcommand("validate", "run both and compare against --pass");
    CLI::App* sweep = app.add_subcommand("sweep", "analytic threshold sweeps (grid syntax a:b:c)");
    CLI::App* optimize = app.add_subcommand("optimize", "maximize jrsccp over the power box");

    for (CLI::App* sub : {analytic, mc, val, sweep}) {
        add_scenario_options(sub, &a);
        add_metric_options(sub, &a);
    }
    for (CLI::App* sub : {mc, val}) {
        sub->add_option("--n", a.n, "Monte-Carlo realizations")->check(CLI::PositiveNumber);
        sub->add_option("--seed", a.seed, "Monte-Carlo seed");
        sub->add_flag("--exact-ci", a.exact_ci, "Clopper-Pearson intervals instead of normal");
        sub->add_option("--radar-sampling", a.radar_sampling,
                        "lead-vehicle distance sampler: rejection|inverse");
    }
    val->add_option("--pass", a.pass, "max |analytic - mc| to accept")->check(CLI::PositiveNumber);

    add_scenario_options(optimize, &a);
    optimize->add_option("--theta-db", a.theta_db, "comm SIR threshold (dB)")->required();
    optimize->add_option("--theta-p-db", a.theta_p_db, "radar SIR threshold (dB)")->required();
    optimize->add_option("--pl-min-dbm", box.p_l_min_dbm, "traffic-light power lower bound");
    optimize->add_option("--pl-max-dbm", box.p_l_max_dbm, "traffic-light power upper bound");
    optimize->add_option("--pv-min-dbm", box.p_v_min_dbm, "vehicle power lower bound");
    optimize->add_option("--pv-max-dbm", box.p_v_max_dbm, "vehicle power upper bound");
    optimize->add_option("--step-db", box.step_db, "grid resolution (dB)");
    optimize->add_flag("--no-ratio-reduction", no_ratio_reduction, "search the full 2-D grid");
    optimize->add_option("--out", a.out_path, "output file (default stdout)");
    optimize->add_flag("--json", a.json, "emit JSON instead of CSV");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (analytic->parsed()) return run_analytic(a, "analytic");
        if (sweep->parsed()) return run_analytic(a, "sweep");
        if (mc->parsed()) return run_mc(a);
        if (val->parsed()) return run_validate(a);
        if (optimize->parsed()) return run_optimize(a, box, no_ratio_reduction);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const QuadratureError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace dfrcsg::cli
