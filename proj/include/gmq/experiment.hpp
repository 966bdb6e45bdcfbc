#pragma once

#include <gmq/trial.hpp>

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gmq {

struct OutputPaths {
    std::string csv;        // per-trial rows
    std::string summary;    // aggregate JSON
    std::string epoch_log;  // per-epoch rows (pulls, survivors, events)
    std::string round_log;  // per-round elimination telemetry
    std::string pull_log;   // every pull with its bounds; large
};

struct ExperimentConfig {
    TrialSpec spec;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    int threads = 0;
    double c = 1.0;  // bound constants
    double d = 1.0;
    OutputPaths out;

    void validate() const;
};

struct BoundValues {
    std::optional<double> instance_bound;  // summed bucket bound (two-step) or finite-arm bound
    std::optional<double> weakened;
    std::optional<double> multistep;
};

struct AggregateReport {
    std::string instance_id;
    RunMode mode = RunMode::TwoStep;
    std::size_t trials = 0;
    std::size_t successes = 0;
    std::optional<double> success_rate;  // empty when trials == 0
    std::optional<std::pair<double, double>> success_ci;
    double mean_pulls = 0.0;
    double median_pulls = 0.0;
    std::uint64_t max_pulls = 0;
    std::optional<double> event_a_rate;
    std::optional<double> event_b_rate;
    std::optional<double> partition_rate;
    std::uint64_t shortcut_mismatches = 0;
    BoundValues bounds;
    double wall_seconds = 0.0;
};

/// 95% Wilson score interval for k successes out of n > 0.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

BoundValues evaluate_bounds(const ExperimentConfig& config);

AggregateReport aggregate(const ExperimentConfig& config, const std::vector<TrialResult>& trials,
                          double wall_seconds = 0.0);

/// Header plus one row per trial, in trial order.
void write_trials_csv(std::ostream& out, const std::string& instance_id,
                      const std::vector<TrialResult>& trials);
void write_epoch_log(std::ostream& out, const std::vector<TrialResult>& trials);
void write_round_log(std::ostream& out, const std::vector<TrialResult>& trials);
void write_trial_pull_log(std::ostream& out, const std::vector<TrialResult>& trials);

nlohmann::json summary_json(const AggregateReport& report);

/// Runs all trials (OpenMP fan-out), writes every configured output and
/// returns the aggregate. `keep` receives the per-trial results when given.
AggregateReport run_experiment(const ExperimentConfig& config,
                               std::vector<TrialResult>* keep = nullptr);

}  // namespace gmq
