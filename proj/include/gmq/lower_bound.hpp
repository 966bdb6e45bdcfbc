#pragma once

// Worst-case two-atom instance family and the score / likelihood-ratio
// machinery used to check its martingale and drift identities numerically.

#include <gmq/instance.hpp>

#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace gmq {

struct LBParams {
    double eps = 0.2;
    double gap = 0.2;  // Delta
    std::size_t num_groups = 2;

    void validate() const;

    double p() const noexcept { return 0.5 * (1.0 + eps); }
    double pbar() const noexcept { return 0.5 * (1.0 - eps); }
    double q() const noexcept { return 0.5 * (1.0 + gap); }
    double qbar() const noexcept { return 0.5 * (1.0 - gap); }
};

enum class InstanceKind { Good, Bad };

/// One instance per group count: index 0 has group 1 optimal, index j >= 1
/// makes group j + 1 the unique median-optimal group. Group ids are 1-based.
std::vector<BanditInstance> make_worst_case_instances(const LBParams& params);

/// Two-group shorthand: Bad is instance 0, Good is instance 1.
BanditInstance lb_pair_instance(const LBParams& params, InstanceKind kind);

/// Success set used when scoring runs on these instances: eps and gap are
/// divided by `scale` before the relaxed comparison.
std::set<GroupId> lb_success_set(const BanditInstance& instance, const LBParams& params,
                                 double scale = 4.0);

double likelihood_ratio_f(std::int64_t d, const LBParams& params);
double conditional_good_prob(std::int64_t d, const LBParams& params, InstanceKind kind);
/// Exact E[f(d') | d] after one more pull of the same arm.
double expected_next_f(std::int64_t d, const LBParams& params, InstanceKind kind);

struct ScoreState {
    std::int64_t d = 0;
    std::uint64_t pulls = 0;

    void record(double reward) {
        d += reward > 0.5 ? 1 : -1;
        ++pulls;
    }
};

/// L_t = prod_i f(d_i), accumulated in log space.
double product_statistic(std::span<const ScoreState> arms, const LBParams& params);

struct DriftGrid {
    std::vector<double> eps{0.05, 0.1, 0.2};
    std::vector<double> gaps{0.05, 0.1, 0.2};
    std::int64_t d_min = -20;
    std::int64_t d_max = 20;
    double c_drift = 16.0;
    double martingale_tol = 1e-12;

    void validate() const;
    std::size_t size() const noexcept;
};

struct DriftPoint {
    double eps = 0.0;
    double gap = 0.0;
    std::int64_t d = 0;
    double drift_ratio = 0.0;       // (E_good[f(d')] - f(d)) / (Delta^2 eps^2)
    double martingale_error = 0.0;  // |E_bad[f(d')] - f(d)|
    bool pass = false;
};

/// Grid point number `index` in (eps-major, gap, d) order.
DriftPoint evaluate_drift_point(const DriftGrid& grid, std::size_t index);

struct DriftReport {
    std::vector<DriftPoint> rows;
    double sup_ratio = 0.0;
    double inf_ratio = 0.0;
    double max_martingale_error = 0.0;
    bool pass = false;
    std::vector<std::size_t> failing;  // indices into rows
};

DriftReport summarize_drift(std::vector<DriftPoint> rows);

/// Evaluates the whole grid with the OpenMP kernel.
DriftReport verify_drift(const DriftGrid& grid, int threads = 0);

}  // namespace gmq
