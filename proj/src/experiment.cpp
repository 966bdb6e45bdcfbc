#include <gmq/experiment.hpp>
#include <gmq/kernels.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace gmq {

using nlohmann::json;

void ExperimentConfig::validate() const {
    spec.validate();
    if (!(c > 0.0)) throw ValidationError("bounds.c: must be positive");
    if (!(d > 0.0)) throw ValidationError("bounds.d: must be positive");
    if (threads < 0) throw ValidationError("threads: must be non-negative");
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z) {
    if (n == 0) throw std::domain_error("wilson_interval: n must be positive");
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double centre = (phat + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

BoundValues evaluate_bounds(const ExperimentConfig& config) {
    const auto& spec = config.spec;
    BoundValues b;
    switch (spec.mode) {
        case RunMode::TwoStep: {
            RunParams p = spec.params;
            p.alpha = spec.instance.alpha;
            const auto rep = two_step_bound(spec.instance, p, config.c, config.d);
            b.instance_bound = rep.instance_bound;
            b.weakened = rep.weakened;
            break;
        }
        case RunMode::MultiStep:
            b.multistep = multistep_bound(spec.instance, spec.schedule, spec.params.delta, config.c);
            b.weakened = weakened_bound(spec.instance.groups.size(), spec.schedule.eps.back(),
                                        spec.schedule.gap.back(), spec.params.delta, config.d);
            break;
        case RunMode::Finite: {
            std::vector<FiniteGroup> groups(spec.finite_means.size());
            std::vector<double> flat;
            for (std::size_t g = 0; g < groups.size(); ++g) {
                groups[g].id = spec.instance.groups[g].id;
                for (double m : spec.finite_means[g]) {
                    groups[g].arms.push_back(flat.size());
                    flat.push_back(m);
                }
            }
            const auto profile = gap_profile(groups, flat, spec.instance.alpha, spec.params.gap);
            b.instance_bound = bound_pulls_finite(profile, flat.size(), spec.params.delta, config.c);
            break;
        }
    }
    return b;
}

AggregateReport aggregate(const ExperimentConfig& config, const std::vector<TrialResult>& trials,
                          double wall_seconds) {
    AggregateReport r;
    r.instance_id = config.spec.instance.id;
    r.mode = config.spec.mode;
    r.trials = trials.size();
    r.wall_seconds = wall_seconds;
    r.bounds = evaluate_bounds(config);
    if (trials.empty()) return r;

    std::size_t a = 0, b = 0, part = 0;
    std::vector<std::uint64_t> pulls;
    pulls.reserve(trials.size());
    double sum = 0.0;
    for (const auto& t : trials) {
        r.successes += t.success;
        a += t.event_a;
        b += t.event_b;
        part += t.partition_ok;
        r.shortcut_mismatches += t.shortcut_mismatches;
        pulls.push_back(t.total_pulls);
        sum += static_cast<double>(t.total_pulls);
    }
    const double n = static_cast<double>(trials.size());
    r.success_rate = static_cast<double>(r.successes) / n;
    r.success_ci = wilson_interval(r.successes, trials.size());
    r.mean_pulls = sum / n;
    std::sort(pulls.begin(), pulls.end());
    const std::size_t mid = pulls.size() / 2;
    r.median_pulls = pulls.size() % 2 ? static_cast<double>(pulls[mid])
                                      : 0.5 * (static_cast<double>(pulls[mid - 1]) + static_cast<double>(pulls[mid]));
    r.max_pulls = pulls.back();
    r.event_b_rate = static_cast<double>(b) / n;
    if (config.spec.mode != RunMode::Finite) {
        r.event_a_rate = static_cast<double>(a) / n;
        r.partition_rate = static_cast<double>(part) / n;
    }
    return r;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

template <class T>
std::string join_ids(const std::vector<T>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(ids[i]);
    }
    return s;
}

std::ofstream open_output(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void write_trials_csv(std::ostream& out, const std::string& instance_id, const std::vector<TrialResult>& trials) {
    out << "trial,instance_id,chosen_group,success,total_pulls,rounds,event_a,max_bucket_size\n";
    const std::string id = csv_field(instance_id);
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto& t = trials[i];
        out << i << ',' << id << ',' << t.chosen << ',' << int(t.success) << ',' << t.total_pulls << ','
            << t.rounds << ',' << int(t.event_a) << ',' << t.max_bucket << '\n';
    }
}

void write_epoch_log(std::ostream& out, const std::vector<TrialResult>& trials) {
    out << "trial,epoch,eps,delta_gap,arms_per_group,pulls,rounds,entering,survivors,event_a,event_b,"
           "max_bucket_size\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < trials.size(); ++i) {
        for (std::size_t k = 0; k < trials[i].epochs.size(); ++k) {
            const auto& e = trials[i].epochs[k];
            out << i << ',' << k + 1 << ',' << e.eps << ',' << e.gap << ',' << e.arms_per_group << ','
                << e.pulls << ',' << e.rounds << ',' << join_ids(e.entering) << ','
                << join_ids(e.survivors) << ',' << int(e.event_a) << ',' << int(e.event_b) << ','
                << e.max_bucket << '\n';
        }
    }
}

void write_round_log(std::ostream& out, const std::vector<TrialResult>& trials) {
    out << "trial,round,active_arms,candidates_after,optimism_gap_after,shortcut_gap\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < trials.size(); ++i) {
        for (const auto& r : trials[i].round_log) {
            out << i << ',' << r.round << ',' << r.active_arms << ',' << r.candidates_after << ','
                << r.optimism_gap_after << ',' << r.shortcut_gap << '\n';
        }
    }
}

void write_trial_pull_log(std::ostream& out, const std::vector<TrialResult>& trials) {
    out << "trial,round,arm,group,reward,lcb,ucb\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < trials.size(); ++i) {
        for (const auto& p : trials[i].pull_log) {
            out << i << ',' << p.round << ',' << p.arm << ',' << p.group << ',' << p.reward << ','
                << p.lcb << ',' << p.ucb << '\n';
        }
    }
}

json summary_json(const AggregateReport& r) {
    json j;
    j["instance_id"] = r.instance_id;
    j["mode"] = to_string(r.mode);
    j["trials"] = r.trials;
    j["successes"] = r.successes;
    j["success_rate"] = opt(r.success_rate);
    j["success_ci95"] = r.success_ci ? json::array({r.success_ci->first, r.success_ci->second}) : json(nullptr);
    j["pulls"] = {{"mean", r.trials ? json(r.mean_pulls) : json(nullptr)},
                  {"median", r.trials ? json(r.median_pulls) : json(nullptr)},
                  {"max", r.trials ? json(r.max_pulls) : json(nullptr)}};
    j["event_a_rate"] = opt(r.event_a_rate);
    j["event_b_rate"] = opt(r.event_b_rate);
    j["partition_rate"] = opt(r.partition_rate);
    j["shortcut_mismatches"] = r.shortcut_mismatches;
    j["bounds"] = {{"instance", opt(r.bounds.instance_bound)},
                   {"weakened", opt(r.bounds.weakened)},
                   {"multistep", opt(r.bounds.multistep)}};
    j["wall_seconds"] = r.wall_seconds;
    return j;
}

AggregateReport run_experiment(const ExperimentConfig& config, std::vector<TrialResult>* keep) {
    config.validate();
    ExperimentConfig cfg = config;
    cfg.spec.options.record_rounds = !cfg.out.round_log.empty();
    cfg.spec.options.record_pulls = !cfg.out.pull_log.empty();

    const auto start = std::chrono::steady_clock::now();
    auto trials = kernels::run_trials_omp(cfg.spec, cfg.trials, cfg.seed, cfg.threads);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto report = aggregate(cfg, trials, wall);

    if (!cfg.out.csv.empty()) {
        auto out = open_output(cfg.out.csv);
        write_trials_csv(out, cfg.spec.instance.id, trials);
    }
    if (!cfg.out.epoch_log.empty()) {
        auto out = open_output(cfg.out.epoch_log);
        write_epoch_log(out, trials);
    }
    if (!cfg.out.round_log.empty()) {
        auto out = open_output(cfg.out.round_log);
        write_round_log(out, trials);
    }
    if (!cfg.out.pull_log.empty()) {
        auto out = open_output(cfg.out.pull_log);
        write_trial_pull_log(out, trials);
    }
    if (!cfg.out.summary.empty()) {
        auto out = open_output(cfg.out.summary);
        out << summary_json(report).dump(2) << '\n';
    }
    if (keep) *keep = std::move(trials);
    return report;
}

}  // namespace gmq
