#pragma once

// Successive elimination for grouped max-quantile identification over a finite
// set of finite arm groups, plus the gap quantities that govern its pull count.

#include <gmq/confidence.hpp>
#include <gmq/instance.hpp>
#include <gmq/rng.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace gmq {

/// A finite arm group. Arm ids index a global 0..n-1 range; groups are disjoint.
struct FiniteGroup {
    GroupId id;
    std::vector<std::size_t> arms;
};

/// Smallest v in `values` with #{u <= v} / |values| >= 1 - alpha.
/// Throws std::domain_error on an empty list.
double multiset_quantile(std::span<const double> values, double alpha);

/// Same as multiset_quantile but partially reorders `values` instead of copying.
double multiset_quantile_inplace(std::span<double> values, double alpha);

/// Per-arm statistics and the bounds from the arm's last pull. Bounds of an arm
/// that stops being pulled stay frozen at their last values.
struct ArmLedger {
    std::vector<PullStats> stats;
    std::vector<double> lcb;
    std::vector<double> ucb;

    explicit ArmLedger(std::size_t n);
    std::size_t size() const noexcept { return stats.size(); }
};

/// Sets as they stand at the beginning of `round`.
struct EliminationState {
    std::uint64_t round = 1;
    std::vector<std::size_t> candidates;               // positions of surviving groups
    std::vector<std::vector<std::size_t>> potential;   // potential quantile arms, by group position
    std::vector<std::size_t> active;                   // arms pulled this round, ascending
    double optimism_gap = std::numeric_limits<double>::infinity();
};

struct PullRecord {
    std::uint64_t round;
    std::size_t arm;
    GroupId group;
    double reward;
    double lcb;
    double ucb;
};

struct RoundTelemetry {
    std::uint64_t round;
    std::size_t active_arms;       // |B_t|
    std::size_t candidates_after;  // |C_{t+1}|
    double optimism_gap_after;     // direct value
    double shortcut_gap;           // 2 U(t, delta/n)
};

/// Reward source for arm ids; the only view of the arms an algorithm gets.
using RewardOracle = std::function<double(std::size_t arm)>;

class FiniteBqid {
public:
    FiniteBqid(std::vector<FiniteGroup> groups, double alpha, double gap, double delta);

    /// Loop condition: more than one candidate and optimism gap above the target gap.
    bool running() const noexcept;

    /// One elimination round: pull every active arm once, refresh bounds, then
    /// shrink candidates, potential quantile arms and the active set.
    void step(const RewardOracle& env);

    /// Candidate maximizing the LCB quantile of the last round, ties broken uniformly.
    GroupId choose(Rng& rng) const;

    const std::vector<FiniteGroup>& groups() const noexcept { return groups_; }
    const EliminationState& state() const noexcept { return state_; }
    const ArmLedger& ledger() const noexcept { return ledger_; }
    std::size_t group_position_of(std::size_t arm) const { return group_pos_[arm]; }
    std::size_t arm_count() const noexcept { return ledger_.size(); }
    double delta_per_arm() const noexcept { return delta_per_arm_; }
    double alpha() const noexcept { return alpha_; }
    double gap() const noexcept { return gap_; }
    std::uint64_t total_pulls() const noexcept { return total_pulls_; }
    std::uint64_t rounds_done() const noexcept { return state_.round - 1; }
    double last_shortcut_gap() const noexcept { return last_shortcut_; }
    std::uint64_t shortcut_mismatches() const noexcept { return shortcut_mismatches_; }
    /// LCB / UCB quantiles from the most recent round, by group position.
    const std::vector<double>& lcb_quantiles() const noexcept { return lcb_q_; }
    const std::vector<double>& ucb_quantiles() const noexcept { return ucb_q_; }

    void set_pull_log(std::vector<PullRecord>* sink) noexcept { pull_log_ = sink; }

private:
    double group_quantile(std::size_t pos, const std::vector<double>& values);

    std::vector<FiniteGroup> groups_;
    std::vector<std::size_t> group_pos_;
    double alpha_;
    double gap_;
    double delta_per_arm_;
    ArmLedger ledger_;
    EliminationState state_;
    std::vector<double> lcb_q_;
    std::vector<double> ucb_q_;
    std::vector<double> scratch_;
    std::uint64_t total_pulls_ = 0;
    double last_shortcut_ = std::numeric_limits<double>::infinity();
    std::uint64_t shortcut_mismatches_ = 0;
    std::vector<PullRecord>* pull_log_ = nullptr;
};

struct BqidOptions {
    bool record_pulls = false;
    bool record_rounds = false;
    /// Called after every round with the post-round state.
    std::function<void(const FiniteBqid&)> observer;
};

struct BqidResult {
    GroupId chosen = 0;
    std::vector<GroupId> survivors;  // candidates at exit
    std::uint64_t rounds = 0;
    std::uint64_t total_pulls = 0;
    std::uint64_t shortcut_mismatches = 0;
    std::vector<PullRecord> pulls;
    std::vector<RoundTelemetry> round_log;
};

/// Runs elimination to completion: until one candidate is left or the optimism
/// gap drops to `gap`. Per-arm confidence budget is delta / n.
BqidResult run_bqid(const std::vector<FiniteGroup>& groups, double alpha, double gap, double delta,
                    const RewardOracle& env, Rng& rng, const BqidOptions& options = {});

/// Oracle-side gap quantities for a realized set of finite groups.
struct GapProfile {
    std::size_t best_position = 0;    // H*, lowest position among ties
    std::vector<double> group_gap;    // Delta_H by group position
    double uniqueness_gap = 0.0;      // Delta_0; +inf with a single group
    std::vector<double> arm_offset;   // Delta'_{H,j} by arm id
    std::vector<double> arm_gap;      // max{Delta, Delta_H, Delta_0, Delta'_{H,j}} by arm id
};

GapProfile gap_profile(const std::vector<FiniteGroup>& groups, std::span<const double> means,
                       double alpha, double gap);

/// sum_j (c / g_j^2) * ln((n / delta) * ln(max(1 / g_j^2, e))).
/// Throws std::domain_error when a gap is not positive.
double bound_pulls_finite(const GapProfile& profile, std::size_t n, double delta, double c);
double bound_pulls_finite(std::span<const double> arm_gaps, std::size_t n, double delta, double c);

/// CSV rows: round,arm,group,reward,lcb,ucb.
void write_pull_log(std::ostream& out, std::span<const PullRecord> records);

}  // namespace gmq
