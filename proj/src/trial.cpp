#include <gmq/trial.hpp>

#include <algorithm>

namespace gmq {

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::TwoStep: return "two_step";
        case RunMode::MultiStep: return "multi_step";
        case RunMode::Finite: return "finite";
    }
    return "unknown";
}

RunMode parse_run_mode(const std::string& text) {
    if (text == "two_step") return RunMode::TwoStep;
    if (text == "multi_step") return RunMode::MultiStep;
    if (text == "finite") return RunMode::Finite;
    throw ValidationError("mode: expected two_step, multi_step or finite, got '" + text + "'");
}

void TrialSpec::validate() const {
    instance.validate();
    switch (mode) {
        case RunMode::TwoStep: {
            RunParams p = params;
            p.alpha = instance.alpha;
            p.validate();
            break;
        }
        case RunMode::MultiStep:
            if (!(params.delta > 0.0 && params.delta < 1.0))
                throw ValidationError("params.delta: must lie in (0, 1)");
            schedule.validate(instance.alpha, params.delta);
            break;
        case RunMode::Finite:
            if (finite_means.size() != instance.groups.size())
                throw ValidationError("instance.groups: finite mode needs explicit arms for every group");
            for (std::size_t g = 0; g < finite_means.size(); ++g) {
                if (finite_means[g].empty())
                    throw ValidationError("instance.groups[" + std::to_string(g) + "].arms: must be non-empty");
            }
            if (!(params.delta > 0.0 && params.delta < 1.0))
                throw ValidationError("params.delta: must lie in (0, 1)");
            if (!(params.gap > 0.0)) throw ValidationError("params.delta_gap: must be positive");
            break;
    }
}

TrialResult run_finite(const BanditInstance& instance, const std::vector<std::vector<double>>& means,
                       const RunParams& params, Rng& rng, const RunOptions& options) {
    std::vector<FiniteGroup> groups(means.size());
    std::vector<double> flat;
    for (std::size_t g = 0; g < means.size(); ++g) {
        groups[g].id = instance.groups[g].id;
        for (double m : means[g]) {
            groups[g].arms.push_back(flat.size());
            flat.push_back(m);
        }
    }
    const bool noiseless = options.noiseless;
    RewardOracle env = [&](std::size_t arm) {
        return sample_reward(instance.family, flat[arm], rng, noiseless);
    };
    BqidOptions bq;
    bq.record_pulls = options.record_pulls;
    bq.record_rounds = options.record_rounds;
    auto res = run_bqid(groups, instance.alpha, params.gap, params.delta, env, rng, bq);

    TrialResult t;
    t.chosen = res.chosen;
    t.total_pulls = res.total_pulls;
    t.rounds = res.rounds;
    t.shortcut_mismatches = res.shortcut_mismatches;
    double best = -1.0, chosen_q = 0.0;
    for (std::size_t g = 0; g < means.size(); ++g) {
        const double q = multiset_quantile(means[g], instance.alpha);
        best = std::max(best, q);
        if (groups[g].id == res.chosen) chosen_q = q;
    }
    t.event_b = chosen_q >= best - params.gap;
    t.success = t.event_b;
    t.round_log = std::move(res.round_log);
    t.pull_log = std::move(res.pulls);
    return t;
}

TrialResult run_trial(const TrialSpec& spec, std::uint64_t master_seed, std::uint64_t index) {
    Rng rng = make_trial_rng(master_seed, index);
    switch (spec.mode) {
        case RunMode::TwoStep: {
            RunParams p = spec.params;
            p.alpha = spec.instance.alpha;
            return run_main(spec.instance, p, rng, spec.options);
        }
        case RunMode::MultiStep:
            return run_multistep(spec.instance, spec.schedule, spec.params.delta, rng, spec.options);
        case RunMode::Finite:
            return run_finite(spec.instance, spec.finite_means, spec.params, rng, spec.options);
    }
    throw ValidationError("mode: unsupported");
}

}  // namespace gmq
