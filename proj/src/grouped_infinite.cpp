#include <gmq/grouped_infinite.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gmq {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

// Relative slack for floor/ceil of ratios such as 0.7 / 0.1.
constexpr double kRatioTol = 1e-9;

double clamped_loglog(double inv_sq) { return std::log(std::max(inv_sq, M_E)); }

struct EpochOutcome {
    EpochRecord record;
    BqidResult bqid;
};

EpochOutcome run_epoch(const BanditInstance& instance, const std::vector<std::size_t>& entering,
                       double eps, double gap, double delta, Rng& rng, const RunOptions& options) {
    const std::size_t arms_per_group = compute_N(eps, delta, instance.groups.size());
    const std::size_t k = entering.size();

    std::vector<ArmIdentity> arms;
    arms.reserve(k * arms_per_group);
    std::vector<FiniteGroup> finite(k);
    for (std::size_t slot = 0; slot < k; ++slot) {
        const auto& g = instance.groups[entering[slot]];
        finite[slot].id = g.id;
        finite[slot].arms.reserve(arms_per_group);
        for (std::size_t a = 0; a < arms_per_group; ++a) {
            finite[slot].arms.push_back(arms.size());
            arms.push_back(sample_arm(g.reservoir, g.id, rng));
        }
    }
    std::vector<double> means(arms.size());
    for (std::size_t i = 0; i < arms.size(); ++i) means[i] = arms[i].mean;

    const auto& family = instance.family;
    const bool noiseless = options.noiseless;
    RewardOracle env = [&](std::size_t arm) {
        return sample_reward(family, means[arm], rng, noiseless);
    };
    BqidOptions bq;
    bq.record_pulls = options.record_pulls;
    bq.record_rounds = options.record_rounds;

    EpochOutcome out;
    out.bqid = run_bqid(finite, instance.alpha, gap, delta, env, rng, bq);

    // Oracle-side checks on this epoch's realization.
    auto& rec = out.record;
    rec.eps = eps;
    rec.gap = gap;
    rec.arms_per_group = arms_per_group;
    rec.pulls = out.bqid.total_pulls;
    rec.rounds = out.bqid.rounds;
    rec.survivors = out.bqid.survivors;
    rec.event_a = true;
    rec.max_bucket = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    double chosen_q = 0.0;
    std::vector<double> vals;
    for (std::size_t slot = 0; slot < k; ++slot) {
        const auto& g = instance.groups[entering[slot]];
        rec.entering.push_back(g.id);
        vals.clear();
        for (std::size_t arm : finite[slot].arms) vals.push_back(means[arm]);
        if (!event_a_holds(g.reservoir, vals, instance.alpha, eps)) rec.event_a = false;
        const double q = multiset_quantile_inplace(vals, instance.alpha);
        best_q = std::max(best_q, q);
        if (g.id == out.bqid.chosen) chosen_q = q;

        std::span<const ArmIdentity> group_arms(arms.data() + slot * arms_per_group, arms_per_group);
        const auto part = build_partition(eps, instance.alpha, group_arms);
        rec.max_bucket = std::max(rec.max_bucket, part.largest_bucket());
    }
    rec.event_b = chosen_q >= best_q - gap;
    return out;
}

void absorb(TrialResult& trial, EpochOutcome&& epoch, const RunOptions& options) {
    const auto& rec = epoch.record;
    trial.total_pulls += rec.pulls;
    trial.rounds += rec.rounds;
    trial.event_a = trial.event_a && rec.event_a;
    trial.event_b = trial.event_b && rec.event_b;
    trial.max_bucket = std::max(trial.max_bucket, rec.max_bucket);
    const double cap = 3.0 * rec.eps * static_cast<double>(rec.arms_per_group);
    if (static_cast<double>(rec.max_bucket) > cap) trial.partition_ok = false;
    trial.shortcut_mismatches += epoch.bqid.shortcut_mismatches;
    trial.chosen = epoch.bqid.chosen;
    if (options.record_rounds) {
        trial.round_log.insert(trial.round_log.end(), epoch.bqid.round_log.begin(),
                               epoch.bqid.round_log.end());
    }
    if (options.record_pulls) {
        trial.pull_log.insert(trial.pull_log.end(), epoch.bqid.pulls.begin(), epoch.bqid.pulls.end());
    }
    trial.epochs.push_back(std::move(epoch.record));
}

}  // namespace

void RunParams::validate() const {
    require(alpha > 0.0 && alpha < 1.0, "alpha: must lie in (0, 1)");
    require(delta > 0.0 && delta < 1.0, "delta: must lie in (0, 1)");
    require(eps < std::min(alpha, 1.0 - alpha), "eps: must be below min(alpha, 1 - alpha)");
    require(delta < eps, "delta: must be below eps");
    require(gap > 0.0, "delta_gap: must be positive");
}

std::size_t compute_N(double eps, double delta, std::size_t num_groups) {
    require(eps > 0.0, "eps: must be positive");
    require(delta > 0.0 && delta < 1.0, "delta: must lie in (0, 1)");
    require(num_groups >= 1, "groups: need at least one group");
    const double raw = std::log(2.0 * static_cast<double>(num_groups) / delta) / (2.0 * eps * eps);
    return static_cast<std::size_t>(std::max(1.0, std::ceil(raw)));
}

bool event_a_holds(const ReservoirSpec& spec, std::span<const double> sampled_means, double alpha,
                   double eps) {
    const double q = multiset_quantile(sampled_means, alpha);
    return spec.quantile(1.0 - alpha - eps) <= q && q <= spec.quantile(1.0 - alpha + eps);
}

std::size_t Partition::largest_bucket() const noexcept {
    std::size_t best = 0;
    for (const auto& b : buckets) best = std::max(best, b.size());
    return best;
}

std::size_t lower_bucket_count(double alpha, double eps) {
    return static_cast<std::size_t>(std::floor((1.0 - alpha) / eps + kRatioTol));
}

std::size_t bucket_count(double alpha, double eps) {
    const double target = alpha / eps + static_cast<double>(lower_bucket_count(alpha, eps));
    return static_cast<std::size_t>(std::ceil(target - kRatioTol));
}

std::vector<double> bucket_boundaries(double alpha, double eps) {
    const std::size_t m = bucket_count(alpha, eps);
    const double first = (1.0 - alpha) - static_cast<double>(lower_bucket_count(alpha, eps)) * eps;
    std::vector<double> b(m);
    for (std::size_t i = 0; i < m; ++i) b[i] = std::max(0.0, first + static_cast<double>(i) * eps);
    return b;
}

Partition build_partition(double eps, double alpha, std::span<const ArmIdentity> arms) {
    require(eps > 0.0 && eps < std::min(alpha, 1.0 - alpha),
            "eps: must satisfy 0 < eps < min(alpha, 1 - alpha)");
    Partition p;
    p.boundaries = bucket_boundaries(alpha, eps);
    p.bucket_count = p.boundaries.size();
    p.buckets.resize(p.bucket_count + 1);
    for (std::size_t a = 0; a < arms.size(); ++a) {
        const double j = arms[a].hidden_index;
        const auto idx = static_cast<std::size_t>(
            std::upper_bound(p.boundaries.begin(), p.boundaries.end(), j) - p.boundaries.begin());
        p.buckets[idx].push_back(a);
    }
    return p;
}

TildeGaps tilde_gaps(const BanditInstance& instance, const RunParams& params) {
    params.validate();
    const double a = instance.alpha;
    const double eps = params.eps;
    const std::size_t ng = instance.groups.size();

    std::vector<double> low(ng), high(ng);
    for (std::size_t g = 0; g < ng; ++g) {
        low[g] = instance.groups[g].reservoir.quantile(1.0 - a - eps);
        high[g] = instance.groups[g].reservoir.quantile(1.0 - a + eps);
    }
    const double best_low = *std::max_element(low.begin(), low.end());

    TildeGaps out;
    out.eps = eps;
    out.best_relaxed = static_cast<std::size_t>(std::max_element(high.begin(), high.end()) - high.begin());
    out.group_gap.resize(ng);
    for (std::size_t g = 0; g < ng; ++g) out.group_gap[g] = best_low - high[g];

    double runner_up = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < ng; ++g) {
        if (g != out.best_relaxed) runner_up = std::max(runner_up, high[g]);
    }
    out.uniqueness_gap = best_low - runner_up;  // +inf for a single group

    const auto b = bucket_boundaries(a, eps);
    const std::size_t m = b.size();
    const std::size_t lower = lower_bucket_count(a, eps);
    out.bucket_offset.assign(ng, std::vector<double>(m + 1, 0.0));
    out.combined.assign(ng, std::vector<double>(m + 1, 0.0));
    for (std::size_t g = 0; g < ng; ++g) {
        const auto& res = instance.groups[g].reservoir;
        for (std::size_t i = 0; i <= m; ++i) {
            double offset = 0.0;
            if (i + 1 < lower) {
                offset = low[g] - res.quantile(b[i]);  // b[i] is b_{i+1}
            } else if (i > lower + 1) {
                offset = res.quantile(b[i - 1]) - high[g];
            }
            out.bucket_offset[g][i] = offset;
            out.combined[g][i] =
                std::max({params.gap, out.group_gap[g], out.uniqueness_gap, offset});
        }
    }
    return out;
}

namespace {

double bucket_sum(const TildeGaps& tg, std::size_t num_groups, std::size_t arms_per_group,
                  double delta, double c) {
    const double scale = static_cast<double>(num_groups * arms_per_group) / delta;
    const double bucket_size = 3.0 * tg.eps * static_cast<double>(arms_per_group);
    double total = 0.0;
    for (const auto& row : tg.combined) {
        for (std::size_t i = 1; i < row.size(); ++i) {
            const double inv_sq = 1.0 / (row[i] * row[i]);
            total += c * inv_sq * std::log(scale * clamped_loglog(inv_sq)) * bucket_size;
        }
    }
    return total;
}

}  // namespace

double weakened_bound(std::size_t num_groups, double eps, double gap, double delta, double d) {
    const double L = std::log(static_cast<double>(num_groups) / delta);
    const double loglog = std::max(0.0, std::log(std::log(1.0 / gap)));
    return d * static_cast<double>(num_groups) / (eps * eps * gap * gap) * (L * L + L * loglog);
}

BoundReport two_step_bound(const BanditInstance& instance, const RunParams& params, double c,
                             double d) {
    const auto tg = tilde_gaps(instance, params);
    const std::size_t ng = instance.groups.size();
    const std::size_t n = compute_N(params.eps, params.delta, ng);
    return {bucket_sum(tg, ng, n, params.delta, c),
            weakened_bound(ng, params.eps, params.gap, params.delta, d)};
}

void Schedule::validate(double alpha, double delta) const {
    require(!eps.empty(), "schedule.eps: needs at least one epoch");
    require(eps.size() == gap.size(), "schedule: eps and delta_gap lists must have equal length");
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const std::string at = "schedule[" + std::to_string(k) + "]";
        require(delta < eps[k] && eps[k] < std::min(alpha, 1.0 - alpha),
                at + ".eps: must satisfy delta < eps < min(alpha, 1 - alpha)");
        require(gap[k] > 0.0, at + ".delta_gap: must be positive");
    }
}

TrialResult run_main(const BanditInstance& instance, const RunParams& params, Rng& rng,
                     const RunOptions& options) {
    instance.validate();
    RunParams p = params;
    p.alpha = instance.alpha;
    p.validate();

    std::vector<std::size_t> all(instance.groups.size());
    for (std::size_t g = 0; g < all.size(); ++g) all[g] = g;

    TrialResult trial;
    absorb(trial, run_epoch(instance, all, p.eps, p.gap, p.delta, rng, options), options);
    const auto ok = relaxed_success_set(instance, instance.alpha, p.eps, p.gap);
    trial.success = ok.contains(trial.chosen);
    return trial;
}

TrialResult run_multistep(const BanditInstance& instance, const Schedule& schedule, double delta,
                          Rng& rng, const RunOptions& options) {
    instance.validate();
    require(delta > 0.0 && delta < 1.0, "delta: must lie in (0, 1)");
    schedule.validate(instance.alpha, delta);

    std::vector<std::size_t> alive(instance.groups.size());
    for (std::size_t g = 0; g < alive.size(); ++g) alive[g] = g;

    TrialResult trial;
    const std::size_t K = schedule.eps.size();
    for (std::size_t k = 0; k < K; ++k) {
        auto epoch = run_epoch(instance, alive, schedule.eps[k], schedule.gap[k], delta, rng, options);
        std::vector<std::size_t> next;
        for (GroupId id : epoch.bqid.survivors) next.push_back(instance.index_of(id));
        absorb(trial, std::move(epoch), options);
        alive = std::move(next);
        if (alive.size() <= 1) break;
    }
    const auto ok = relaxed_success_set(instance, instance.alpha, schedule.eps.back(), schedule.gap.back());
    trial.success = ok.contains(trial.chosen);
    return trial;
}

std::vector<std::size_t> k_max(const BanditInstance& instance, const Schedule& schedule, double delta) {
    schedule.validate(instance.alpha, delta);
    const std::size_t K = schedule.eps.size();
    std::vector<std::size_t> out(instance.groups.size(), K);
    for (std::size_t k = K; k-- > 0;) {
        const auto tg = tilde_gaps(instance, {instance.alpha, schedule.eps[k], schedule.gap[k], delta});
        for (std::size_t g = 0; g < out.size(); ++g) {
            if (tg.group_gap[g] > schedule.gap[k]) out[g] = k + 1;
        }
    }
    return out;
}

double multistep_bound(const BanditInstance& instance, const Schedule& schedule, double delta, double c) {
    const auto kmax = k_max(instance, schedule, delta);
    const std::size_t ng = instance.groups.size();
    double total = 0.0;
    for (std::size_t k = 0; k < schedule.eps.size(); ++k) {
        const RunParams p{instance.alpha, schedule.eps[k], schedule.gap[k], delta};
        auto tg = tilde_gaps(instance, p);
        // Keep only groups still counted at epoch k + 1.
        for (std::size_t g = 0; g < ng; ++g) {
            if (k + 1 > kmax[g]) tg.combined[g].assign(1, 1.0);
        }
        total += bucket_sum(tg, ng, compute_N(p.eps, delta, ng), delta, c);
    }
    return total;
}

}  // namespace gmq
