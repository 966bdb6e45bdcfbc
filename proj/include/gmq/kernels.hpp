#pragma once

// Data-parallel kernels. Each has a serial reference and an OpenMP version
// that must return identical results; `threads <= 0` means the OpenMP default.

#include <gmq/lower_bound.hpp>
#include <gmq/trial.hpp>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gmq::kernels {

/// Results in trial order.
std::vector<TrialResult> run_trials_serial(const TrialSpec& spec, std::size_t trials,
                                           std::uint64_t seed);
std::vector<TrialResult> run_trials_omp(const TrialSpec& spec, std::size_t trials,
                                        std::uint64_t seed, int threads = 0);

/// Counts over independent arm resamples (N per group at the given eps, delta).
struct ResampleCounts {
    std::size_t resamples = 0;
    std::size_t event_a = 0;       // every group's sampled quantile is sandwiched
    std::size_t partition_ok = 0;  // every bucket holds at most 3 eps N arms

    bool operator==(const ResampleCounts&) const = default;
};

ResampleCounts resample_events_serial(const BanditInstance& instance, double eps, double delta,
                                      std::size_t resamples, std::uint64_t seed);
ResampleCounts resample_events_omp(const BanditInstance& instance, double eps, double delta,
                                   std::size_t resamples, std::uint64_t seed, int threads = 0);

/// One resample, shared by both versions.
void resample_once(const BanditInstance& instance, double eps, std::size_t arms_per_group,
                   std::uint64_t seed, std::uint64_t index, bool& event_a, bool& partition_ok);

std::vector<DriftPoint> drift_grid_serial(const DriftGrid& grid);
std::vector<DriftPoint> drift_grid_omp(const DriftGrid& grid, int threads = 0);

}  // namespace gmq::kernels
