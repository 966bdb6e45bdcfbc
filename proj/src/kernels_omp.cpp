#include <gmq/kernels.hpp>

#include <omp.h>

#include <exception>

namespace gmq::kernels {

namespace {

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

}  // namespace

std::vector<TrialResult> run_trials_omp(const TrialSpec& spec, std::size_t trials,
                                        std::uint64_t seed, int threads) {
    spec.validate();
    std::vector<TrialResult> out(trials);
    std::exception_ptr failure;
    const auto n = static_cast<std::int64_t>(trials);
    // Trial costs vary by orders of magnitude, hence dynamic scheduling.
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = run_trial(spec, seed, static_cast<std::uint64_t>(i));
        } catch (...) {
#pragma omp critical(gmq_trial_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

ResampleCounts resample_events_omp(const BanditInstance& instance, double eps, double delta,
                                   std::size_t resamples, std::uint64_t seed, int threads) {
    instance.validate();
    const std::size_t arms = compute_N(eps, delta, instance.groups.size());
    std::size_t hits_a = 0, hits_p = 0;
    const auto n = static_cast<std::int64_t>(resamples);
#pragma omp parallel for schedule(static) reduction(+ : hits_a, hits_p) \
    num_threads(resolve_threads(threads))
    for (std::int64_t i = 0; i < n; ++i) {
        bool a = false, p = false;
        resample_once(instance, eps, arms, seed, static_cast<std::uint64_t>(i), a, p);
        hits_a += a;
        hits_p += p;
    }
    return {resamples, hits_a, hits_p};
}

std::vector<DriftPoint> drift_grid_omp(const DriftGrid& grid, int threads) {
    grid.validate();
    std::vector<DriftPoint> rows(grid.size());
    const auto n = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
    for (std::int64_t i = 0; i < n; ++i) {
        rows[static_cast<std::size_t>(i)] = evaluate_drift_point(grid, static_cast<std::size_t>(i));
    }
    return rows;
}

}  // namespace gmq::kernels
