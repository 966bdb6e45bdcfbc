#include <gmq/kernels.hpp>

#include <algorithm>

namespace gmq::kernels {

std::vector<TrialResult> run_trials_serial(const TrialSpec& spec, std::size_t trials,
                                           std::uint64_t seed) {
    spec.validate();
    std::vector<TrialResult> out;
    out.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) out.push_back(run_trial(spec, seed, i));
    return out;
}

void resample_once(const BanditInstance& instance, double eps, std::size_t arms_per_group,
                   std::uint64_t seed, std::uint64_t index, bool& event_a, bool& partition_ok) {
    Rng rng = make_trial_rng(seed, index);
    const double cap = 3.0 * eps * static_cast<double>(arms_per_group);
    std::vector<ArmIdentity> arms(arms_per_group);
    std::vector<double> means(arms_per_group);
    event_a = true;
    partition_ok = true;
    for (const auto& g : instance.groups) {
        for (std::size_t a = 0; a < arms_per_group; ++a) {
            arms[a] = sample_arm(g.reservoir, g.id, rng);
            means[a] = arms[a].mean;
        }
        if (!event_a_holds(g.reservoir, means, instance.alpha, eps)) event_a = false;
        const auto part = build_partition(eps, instance.alpha, arms);
        if (static_cast<double>(part.largest_bucket()) > cap) partition_ok = false;
    }
}

ResampleCounts resample_events_serial(const BanditInstance& instance, double eps, double delta,
                                      std::size_t resamples, std::uint64_t seed) {
    instance.validate();
    const std::size_t n = compute_N(eps, delta, instance.groups.size());
    ResampleCounts c;
    c.resamples = resamples;
    for (std::size_t i = 0; i < resamples; ++i) {
        bool a = false, p = false;
        resample_once(instance, eps, n, seed, i, a, p);
        c.event_a += a;
        c.partition_ok += p;
    }
    return c;
}

std::vector<DriftPoint> drift_grid_serial(const DriftGrid& grid) {
    grid.validate();
    std::vector<DriftPoint> rows(grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = evaluate_drift_point(grid, i);
    return rows;
}

}  // namespace gmq::kernels
