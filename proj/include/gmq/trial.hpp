#pragma once

#include <gmq/grouped_infinite.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace gmq {

enum class RunMode { TwoStep, MultiStep, Finite };

std::string to_string(RunMode mode);
RunMode parse_run_mode(const std::string& text);  // throws ValidationError

/// Everything one trial needs. Shared read-only between worker threads.
struct TrialSpec {
    BanditInstance instance;
    RunMode mode = RunMode::TwoStep;
    RunParams params;                              // two-step, and gap/delta for finite mode
    Schedule schedule;                             // multi-step only
    std::vector<std::vector<double>> finite_means; // finite mode: arm means by group position
    RunOptions options;

    void validate() const;
};

/// Runs trial `index` on the stream derived from (master_seed, index).
TrialResult run_trial(const TrialSpec& spec, std::uint64_t master_seed, std::uint64_t index);

/// Finite mode on explicit arm means; success means the chosen group's
/// quantile is within the gap of the best one.
TrialResult run_finite(const BanditInstance& instance, const std::vector<std::vector<double>>& means,
                       const RunParams& params, Rng& rng, const RunOptions& options = {});

}  // namespace gmq
