#include <gmq/cli.hpp>
#include <gmq/config.hpp>
#include <gmq/experiment.hpp>
#include <gmq/lower_bound.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace gmq {

namespace {

// Flags shared by `run`, `sweep` and `bound`. Unset options leave the config untouched.
struct Overrides {
    std::string config;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha, eps, delta, gap, c, d;
    std::optional<int> threads;
    bool noiseless = false;
    std::string out, epoch_log, round_log, pull_log;

    void apply(ExperimentConfig& cfg) const {
        if (trials) cfg.trials = *trials;
        if (seed) cfg.seed = *seed;
        if (alpha) {
            cfg.spec.instance.alpha = *alpha;
            cfg.spec.params.alpha = *alpha;
        }
        if (eps) cfg.spec.params.eps = *eps;
        if (delta) cfg.spec.params.delta = *delta;
        if (gap) cfg.spec.params.gap = *gap;
        if (c) cfg.c = *c;
        if (d) cfg.d = *d;
        if (threads) cfg.threads = *threads;
        if (noiseless) cfg.spec.options.noiseless = true;
        if (!out.empty()) {
            cfg.out.csv = (std::filesystem::path(out) / "trials.csv").string();
            cfg.out.summary = (std::filesystem::path(out) / "summary.json").string();
        }
        if (!epoch_log.empty()) cfg.out.epoch_log = epoch_log;
        if (!round_log.empty()) cfg.out.round_log = round_log;
        if (!pull_log.empty()) cfg.out.pull_log = pull_log;
    }
};

void add_scalar_flags(CLI::App* app, Overrides& o, bool with_run_flags) {
    app->add_option("--config", o.config, "Experiment config (JSON)")->required();
    app->add_option("--alpha", o.alpha, "Quantile level alpha");
    app->add_option("--c", o.c, "Constant c in the bucket bounds");
    app->add_option("--d", o.d, "Constant d in the weakened bound");
    if (!with_run_flags) return;
    app->add_option("--trials", o.trials, "Number of trials");
    app->add_option("--seed", o.seed, "Master seed");
    app->add_option("--threads", o.threads, "Worker threads (0 = OpenMP default)");
    app->add_flag("--noiseless", o.noiseless, "Rewards equal arm means");
}

void add_param_flags(CLI::App* app, Overrides& o) {
    app->add_option("--eps", o.eps, "Quantile-level relaxation eps");
    app->add_option("--delta", o.delta, "Error probability delta");
    app->add_option("--delta-gap", o.gap, "Value relaxation Delta");
}

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

void print_report(std::ostream& out, const AggregateReport& r) { out << summary_json(r).dump(2) << '\n'; }

int cmd_run(const Overrides& o, std::ostream& out) {
    auto cfg = load_config(o.config);
    o.apply(cfg);
    print_report(out, run_experiment(cfg));
    return 0;
}

struct SweepLists {
    std::vector<double> eps, gap, delta;
};

int cmd_sweep(const Overrides& o, const SweepLists& lists, const std::string& out_dir, std::ostream& out) {
    auto base = load_config(o.config);
    o.apply(base);
    base.out = {};
    const bool multi = base.spec.mode == RunMode::MultiStep;
    if (multi && (!lists.eps.empty() || !lists.gap.empty()))
        throw ValidationError("sweep: multi_step configs only sweep --delta");
    const auto eps = lists.eps.empty() ? std::vector<double>{base.spec.params.eps} : lists.eps;
    const auto gap = lists.gap.empty() ? std::vector<double>{base.spec.params.gap} : lists.gap;
    const auto del = lists.delta.empty() ? std::vector<double>{base.spec.params.delta} : lists.delta;

    std::vector<ExperimentConfig> points;
    for (double e : eps) {
        for (double g : gap) {
            for (double dl : del) {
                ExperimentConfig cfg = base;
                cfg.spec.params.eps = e;
                cfg.spec.params.gap = g;
                cfg.spec.params.delta = dl;
                try {
                    cfg.validate();
                } catch (const ValidationError& err) {
                    throw ValidationError("sweep point eps=" + fmt(e) + " delta_gap=" + fmt(g) +
                                          " delta=" + fmt(dl) + ": " + err.what());
                }
                if (!out_dir.empty()) {
                    const auto name = "point_" + std::to_string(points.size()) + ".csv";
                    cfg.out.csv = (std::filesystem::path(out_dir) / name).string();
                }
                points.push_back(std::move(cfg));
            }
        }
    }

    std::ostringstream table;
    table << "point,eps,delta_gap,delta,trials,success_rate,ci_low,ci_high,mean_pulls,median_pulls,"
             "max_pulls,event_a_rate\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& p = points[k].spec.params;
        const auto r = run_experiment(points[k]);
        table << k << ',' << fmt(p.eps) << ',' << fmt(p.gap) << ',' << fmt(p.delta) << ',' << r.trials << ',';
        if (r.success_rate) {
            table << fmt(*r.success_rate) << ',' << fmt(r.success_ci->first) << ',' << fmt(r.success_ci->second);
        } else {
            table << ",,";
        }
        table << ',' << fmt(r.mean_pulls) << ',' << fmt(r.median_pulls) << ',' << r.max_pulls << ','
              << (r.event_a_rate ? fmt(*r.event_a_rate) : std::string()) << '\n';
    }
    out << table.str();
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream f(std::filesystem::path(out_dir) / "sweep.csv", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write sweep.csv under '" + out_dir + "'");
        f << table.str();
    }
    return 0;
}

int cmd_bound(const Overrides& o, std::ostream& out) {
    auto cfg = load_config(o.config);
    o.apply(cfg);
    cfg.validate();
    const auto& spec = cfg.spec;
    const auto b = evaluate_bounds(cfg);
    out << "instance: " << spec.instance.id << "\nmode: " << to_string(spec.mode) << '\n';
    switch (spec.mode) {
        case RunMode::TwoStep: {
            RunParams p = spec.params;
            p.alpha = spec.instance.alpha;
            const auto tg = tilde_gaps(spec.instance, p);
            out << "arms_per_group: " << compute_N(p.eps, p.delta, spec.instance.groups.size()) << '\n';
            out << "buckets: " << bucket_count(p.alpha, p.eps) << '\n';
            for (std::size_t g = 0; g < spec.instance.groups.size(); ++g) {
                out << "group " << spec.instance.groups[g].id << " reservoir_gap: " << fmt(tg.group_gap[g]) << '\n';
            }
            out << "uniqueness_gap: " << fmt(tg.uniqueness_gap) << '\n';
            out << "bucket_bound: " << fmt(*b.instance_bound) << '\n';
            out << "weakened_bound: " << fmt(*b.weakened) << '\n';
            break;
        }
        case RunMode::MultiStep: {
            const auto km = k_max(spec.instance, spec.schedule, spec.params.delta);
            for (std::size_t g = 0; g < km.size(); ++g) {
                out << "group " << spec.instance.groups[g].id << " k_max: " << km[g] << '\n';
            }
            out << "multistep_bound: " << fmt(*b.multistep) << '\n';
            out << "weakened_bound: " << fmt(*b.weakened) << '\n';
            break;
        }
        case RunMode::Finite:
            out << "finite_bound: " << fmt(*b.instance_bound) << '\n';
            break;
    }
    return 0;
}

struct LbOptions {
    std::vector<double> eps{0.05, 0.1, 0.2};
    std::vector<double> gap{0.05, 0.1, 0.2};
    std::int64_t d_min = -20, d_max = 20;
    double c_drift = 16.0;
    int threads = 0;
    bool quiet = false;
    std::string report;
};

int cmd_verify_lb(const LbOptions& o, std::ostream& out) {
    DriftGrid grid;
    grid.eps = o.eps;
    grid.gaps = o.gap;
    grid.d_min = o.d_min;
    grid.d_max = o.d_max;
    grid.c_drift = o.c_drift;
    const auto rep = verify_drift(grid, o.threads);

    std::ostringstream table;
    table << "eps,delta_gap,d,drift_ratio,martingale_error,pass\n";
    for (const auto& r : rep.rows) {
        table << fmt(r.eps) << ',' << fmt(r.gap) << ',' << r.d << ',' << fmt(r.drift_ratio) << ','
              << fmt(r.martingale_error) << ',' << (r.pass ? "pass" : "FAIL") << '\n';
    }
    if (!o.quiet) out << table.str();
    if (!o.report.empty()) {
        std::ofstream f(o.report, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + o.report + "'");
        f << table.str();
    }
    out << "grid_points: " << rep.rows.size() << '\n'
        << "sup_drift_ratio: " << fmt(rep.sup_ratio) << '\n'
        << "inf_drift_ratio: " << fmt(rep.inf_ratio) << '\n'
        << "max_martingale_error: " << fmt(rep.max_martingale_error) << '\n'
        << "c_drift: " << fmt(o.c_drift) << '\n';
    for (std::size_t i : rep.failing) {
        const auto& r = rep.rows[i];
        out << "offending point: eps=" << fmt(r.eps) << " delta_gap=" << fmt(r.gap) << " d=" << r.d << '\n';
    }
    out << "result: " << (rep.pass ? "PASS" : "FAIL") << '\n';
    return rep.pass ? 0 : 1;
}

struct MakeLbOptions {
    double eps = 0.2, gap = 0.2, delta = 0.1;
    std::size_t groups = 2, trials = 200;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_make_lb(const MakeLbOptions& o, std::ostream& out) {
    const LBParams lb{o.eps, o.gap, o.groups};
    std::filesystem::create_directories(o.out);
    for (auto& inst : make_worst_case_instances(lb)) {
        ExperimentConfig cfg;
        cfg.spec.instance = inst;
        cfg.spec.mode = RunMode::TwoStep;
        cfg.spec.params = {inst.alpha, o.eps, o.gap, o.delta};
        cfg.trials = o.trials;
        cfg.seed = o.seed;
        cfg.out.csv = inst.id + "-trials.csv";
        cfg.out.summary = inst.id + "-summary.json";
        cfg.validate();
        const auto path = std::filesystem::path(o.out) / (inst.id + ".json");
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
        f << config_to_json(cfg).dump(2) << '\n';
        out << path.string() << '\n';
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grouped max-quantile bandit simulator", "gmq"};
    app.require_subcommand(1);

    Overrides run_o;
    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    add_scalar_flags(run, run_o, true);
    add_param_flags(run, run_o);
    run->add_option("--out", run_o.out, "Directory for trials.csv and summary.json");
    run->add_option("--epoch-log", run_o.epoch_log, "Per-epoch CSV");
    run->add_option("--round-log", run_o.round_log, "Per-round CSV");
    run->add_option("--pull-log", run_o.pull_log, "Per-pull CSV (large)");

    Overrides sweep_o;
    SweepLists lists;
    std::string sweep_dir;
    auto* sweep = app.add_subcommand("sweep", "Grid over eps, Delta and delta");
    add_scalar_flags(sweep, sweep_o, true);
    sweep->add_option("--eps", lists.eps, "Comma-separated eps values")->delimiter(',');
    sweep->add_option("--delta-gap", lists.gap, "Comma-separated Delta values")->delimiter(',');
    sweep->add_option("--delta", lists.delta, "Comma-separated delta values")->delimiter(',');
    sweep->add_option("--out", sweep_dir, "Directory for sweep.csv and per-point trial CSVs");

    Overrides bound_o;
    auto* bound = app.add_subcommand("bound", "Evaluate the pull-count bounds for a config");
    add_scalar_flags(bound, bound_o, false);
    add_param_flags(bound, bound_o);

    LbOptions lb_o;
    auto* verify = app.add_subcommand("verify-lb", "Check the score martingale and drift identities on a grid");
    verify->add_option("--eps", lb_o.eps, "Comma-separated eps values in (0, 1/4)")->delimiter(',');
    verify->add_option("--delta-gap", lb_o.gap, "Comma-separated Delta values in (0, 1/4)")->delimiter(',');
    verify->add_option("--d-min", lb_o.d_min, "Smallest score");
    verify->add_option("--d-max", lb_o.d_max, "Largest score");
    verify->add_option("--c-drift", lb_o.c_drift, "Upper envelope for the normalized drift");
    verify->add_option("--threads", lb_o.threads, "Worker threads (0 = OpenMP default)");
    verify->add_option("--out", lb_o.report, "Write the grid table as CSV");
    verify->add_flag("--quiet", lb_o.quiet, "Print only the summary");

    MakeLbOptions mk_o;
    auto* make = app.add_subcommand("make-lb", "Write configs for the worst-case instance family");
    make->add_option("--eps", mk_o.eps, "eps in (0, 1/4)");
    make->add_option("--delta-gap", mk_o.gap, "Delta in (0, 1/4)");
    make->add_option("--delta", mk_o.delta, "Error probability for the generated configs");
    make->add_option("--groups", mk_o.groups, "Number of groups (>= 2)");
    make->add_option("--trials", mk_o.trials, "Trials for the generated configs");
    make->add_option("--seed", mk_o.seed, "Seed for the generated configs");
    make->add_option("--out", mk_o.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*run) return cmd_run(run_o, out);
        if (*sweep) return cmd_sweep(sweep_o, lists, sweep_dir, out);
        if (*bound) return cmd_bound(bound_o, out);
        if (*verify) return cmd_verify_lb(lb_o, out);
        if (*make) return cmd_make_lb(mk_o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace gmq
