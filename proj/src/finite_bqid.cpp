#include <gmq/finite_bqid.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gmq {

namespace {

std::size_t quantile_rank(std::size_t n, double alpha) {
    // Smallest k (0-based, sorted order) with (k + 1) / n >= 1 - alpha.
    const double level = (1.0 - alpha) * static_cast<double>(n);
    const double k = std::ceil(level - 1e-9) - 1.0;
    if (k <= 0.0) return 0;
    return std::min(n - 1, static_cast<std::size_t>(k));
}

}  // namespace

double multiset_quantile_inplace(std::span<double> values, double alpha) {
    if (values.empty()) throw std::domain_error("multiset_quantile: empty multiset");
    const auto k = quantile_rank(values.size(), alpha);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
    return values[k];
}

double multiset_quantile(std::span<const double> values, double alpha) {
    std::vector<double> copy(values.begin(), values.end());
    return multiset_quantile_inplace(copy, alpha);
}

ArmLedger::ArmLedger(std::size_t n) : stats(n) {
    const auto b = unpulled_bounds();
    lcb.assign(n, b.lcb);
    ucb.assign(n, b.ucb);
}

FiniteBqid::FiniteBqid(std::vector<FiniteGroup> groups, double alpha, double gap, double delta)
    : groups_(std::move(groups)), alpha_(alpha), gap_(gap), ledger_(0) {
    if (groups_.empty()) throw ValidationError("groups: need at least one finite group");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha: must lie in (0, 1)");
    if (!(gap > 0.0)) throw ValidationError("delta_gap: must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta: must lie in (0, 1)");

    std::size_t n = 0;
    for (const auto& g : groups_) {
        if (g.arms.empty()) throw ValidationError("groups[" + std::to_string(g.id) + "].arms: empty group");
        n += g.arms.size();
    }
    group_pos_.assign(n, groups_.size());
    for (std::size_t pos = 0; pos < groups_.size(); ++pos) {
        for (std::size_t arm : groups_[pos].arms) {
            if (arm >= n || group_pos_[arm] != groups_.size()) {
                throw ValidationError("groups: arm ids must be a disjoint cover of 0..n-1");
            }
            group_pos_[arm] = pos;
        }
    }
    ledger_ = ArmLedger(n);
    delta_per_arm_ = delta / static_cast<double>(n);

    state_.candidates.resize(groups_.size());
    state_.potential.resize(groups_.size());
    for (std::size_t pos = 0; pos < groups_.size(); ++pos) {
        state_.candidates[pos] = pos;
        state_.potential[pos] = groups_[pos].arms;
        std::sort(state_.potential[pos].begin(), state_.potential[pos].end());
    }
    state_.active.resize(n);
    for (std::size_t j = 0; j < n; ++j) state_.active[j] = j;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    lcb_q_.assign(groups_.size(), nan);
    ucb_q_.assign(groups_.size(), nan);
}

bool FiniteBqid::running() const noexcept {
    return state_.candidates.size() > 1 && state_.optimism_gap > gap_;
}

double FiniteBqid::group_quantile(std::size_t pos, const std::vector<double>& values) {
    const auto& arms = groups_[pos].arms;
    scratch_.resize(arms.size());
    for (std::size_t i = 0; i < arms.size(); ++i) scratch_[i] = values[arms[i]];
    return multiset_quantile_inplace(scratch_, alpha_);
}

void FiniteBqid::step(const RewardOracle& env) {
    const std::uint64_t t = state_.round;

    for (std::size_t arm : state_.active) {
        const double reward = env(arm);
        auto& s = ledger_.stats[arm];
        s.record(reward);
        const auto b = bounds(s, delta_per_arm_);
        ledger_.lcb[arm] = b.lcb;
        ledger_.ucb[arm] = b.ucb;
        if (pull_log_ != nullptr) {
            pull_log_->push_back({t, arm, groups_[group_pos_[arm]].id, reward, b.lcb, b.ucb});
        }
    }
    total_pulls_ += state_.active.size();

    // Quantiles run over every arm of a group, frozen ones included.
    double best_lcb_q = -std::numeric_limits<double>::infinity();
    for (std::size_t pos : state_.candidates) {
        ucb_q_[pos] = group_quantile(pos, ledger_.ucb);
        lcb_q_[pos] = group_quantile(pos, ledger_.lcb);
        best_lcb_q = std::max(best_lcb_q, lcb_q_[pos]);
    }

    std::vector<std::size_t> next_candidates;
    next_candidates.reserve(state_.candidates.size());
    for (std::size_t pos : state_.candidates) {
        if (ucb_q_[pos] >= best_lcb_q) next_candidates.push_back(pos);
    }

    std::vector<std::size_t> next_active;
    for (std::size_t pos : next_candidates) {
        auto& pot = state_.potential[pos];
        std::erase_if(pot, [&](std::size_t j) {
            return !(ledger_.lcb[j] <= ucb_q_[pos] && ledger_.ucb[j] >= lcb_q_[pos]);
        });
        next_active.insert(next_active.end(), pot.begin(), pot.end());
    }
    std::sort(next_active.begin(), next_active.end());

    double max_u = -std::numeric_limits<double>::infinity();
    double max_l = -std::numeric_limits<double>::infinity();
    for (std::size_t pos : next_candidates) {
        max_u = std::max(max_u, ucb_q_[pos]);
        max_l = std::max(max_l, lcb_q_[pos]);
    }
    const double direct = max_u - max_l;
    last_shortcut_ = 2.0 * confidence_width(t, delta_per_arm_);
    if (std::abs(direct - last_shortcut_) > 1e-9 * std::max(1.0, std::abs(direct))) {
        ++shortcut_mismatches_;
    }

    state_.candidates = std::move(next_candidates);
    state_.active = std::move(next_active);
    state_.optimism_gap = direct;
    state_.round = t + 1;
}

GroupId FiniteBqid::choose(Rng& rng) const {
    const auto& cand = state_.candidates;
    if (cand.size() == 1) return groups_[cand.front()].id;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t pos : cand) best = std::max(best, lcb_q_[pos]);
    std::vector<std::size_t> ties;
    for (std::size_t pos : cand) {
        if (lcb_q_[pos] == best) ties.push_back(pos);
    }
    if (ties.size() == 1) return groups_[ties.front()].id;
    std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
    return groups_[ties[pick(rng)]].id;
}

BqidResult run_bqid(const std::vector<FiniteGroup>& groups, double alpha, double gap, double delta,
                    const RewardOracle& env, Rng& rng, const BqidOptions& options) {
    FiniteBqid algo(groups, alpha, gap, delta);
    BqidResult result;
    if (options.record_pulls) algo.set_pull_log(&result.pulls);

    while (algo.running()) {
        const std::size_t active = algo.state().active.size();
        algo.step(env);
        if (options.record_rounds) {
            result.round_log.push_back({algo.rounds_done(), active, algo.state().candidates.size(),
                                        algo.state().optimism_gap, algo.last_shortcut_gap()});
        }
        if (options.observer) options.observer(algo);
    }

    result.chosen = algo.choose(rng);
    for (std::size_t pos : algo.state().candidates) result.survivors.push_back(algo.groups()[pos].id);
    result.rounds = algo.rounds_done();
    result.total_pulls = algo.total_pulls();
    result.shortcut_mismatches = algo.shortcut_mismatches();
    return result;
}

GapProfile gap_profile(const std::vector<FiniteGroup>& groups, std::span<const double> means,
                       double alpha, double gap) {
    if (groups.empty()) throw std::domain_error("gap_profile: no groups");
    GapProfile prof;
    std::vector<double> q(groups.size());
    std::vector<double> vals;
    for (std::size_t pos = 0; pos < groups.size(); ++pos) {
        vals.clear();
        for (std::size_t arm : groups[pos].arms) vals.push_back(means[arm]);
        q[pos] = multiset_quantile_inplace(vals, alpha);
    }
    for (std::size_t pos = 1; pos < groups.size(); ++pos) {
        if (q[pos] > q[prof.best_position]) prof.best_position = pos;
    }
    const double top = q[prof.best_position];
    prof.group_gap.resize(groups.size());
    prof.uniqueness_gap = std::numeric_limits<double>::infinity();
    for (std::size_t pos = 0; pos < groups.size(); ++pos) {
        prof.group_gap[pos] = top - q[pos];
        if (pos != prof.best_position) prof.uniqueness_gap = std::min(prof.uniqueness_gap, prof.group_gap[pos]);
    }
    prof.arm_offset.assign(means.size(), 0.0);
    prof.arm_gap.assign(means.size(), 0.0);
    for (std::size_t pos = 0; pos < groups.size(); ++pos) {
        for (std::size_t arm : groups[pos].arms) {
            prof.arm_offset[arm] = std::abs(means[arm] - q[pos]);
            prof.arm_gap[arm] = std::max({gap, prof.group_gap[pos], prof.uniqueness_gap, prof.arm_offset[arm]});
        }
    }
    return prof;
}

double bound_pulls_finite(std::span<const double> arm_gaps, std::size_t n, double delta, double c) {
    double total = 0.0;
    const double scale = static_cast<double>(n) / delta;
    for (double g : arm_gaps) {
        if (!(g > 0.0)) throw std::domain_error("bound_pulls_finite: gaps must be positive");
        const double inv_sq = 1.0 / (g * g);
        total += c * inv_sq * std::log(scale * std::log(std::max(inv_sq, M_E)));
    }
    return total;
}

double bound_pulls_finite(const GapProfile& profile, std::size_t n, double delta, double c) {
    return bound_pulls_finite(profile.arm_gap, n, delta, c);
}

void write_pull_log(std::ostream& out, std::span<const PullRecord> records) {
    out << "round,arm,group,reward,lcb,ucb\n";
    out << std::setprecision(17);
    for (const auto& r : records) {
        out << r.round << ',' << r.arm << ',' << r.group << ',' << r.reward << ',' << r.lcb << ','
            << r.ucb << '\n';
    }
}

}  // namespace gmq
