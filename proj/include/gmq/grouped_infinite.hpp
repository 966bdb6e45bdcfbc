#pragma once

// Two-step and multi-step identification of the group with the best
// (1 - alpha)-quantile over infinite arm reservoirs, together with the
// oracle-side partition, gap and bound evaluators used to analyse it.

#include <gmq/finite_bqid.hpp>
#include <gmq/instance.hpp>
#include <gmq/rng.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gmq {

/// alpha, eps, target gap Delta and error budget delta with delta < eps < min(alpha, 1 - alpha).
struct RunParams {
    double alpha = 0.5;
    double eps = 0.1;
    double gap = 0.1;
    double delta = 0.05;

    void validate() const;
};

/// ceil(ln(2 |G| / delta) / (2 eps^2)): arms requested per group.
std::size_t compute_N(double eps, double delta, std::size_t num_groups);

/// Sampled quantile sandwiched between the reservoir's (1-alpha-eps) and (1-alpha+eps) quantiles.
bool event_a_holds(const ReservoirSpec& spec, std::span<const double> sampled_means, double alpha,
                   double eps);

/// Buckets of hidden indices: [0,b_1), [b_i, b_{i+1}), [b_m, 1].
struct Partition {
    std::size_t bucket_count = 0;                  // m
    std::vector<double> boundaries;                // b_1..b_m
    std::vector<std::vector<std::size_t>> buckets; // S_0..S_m, entries index the sampled arms

    std::size_t largest_bucket() const noexcept;
};

/// floor((1 - alpha) / eps) with a 1e-9 nudge for ratios like 0.3 / 0.1.
std::size_t lower_bucket_count(double alpha, double eps);
/// m = smallest integer >= alpha/eps + floor((1 - alpha)/eps).
std::size_t bucket_count(double alpha, double eps);
std::vector<double> bucket_boundaries(double alpha, double eps);

Partition build_partition(double eps, double alpha, std::span<const ArmIdentity> arms);

/// Reservoir-level lower bounds on the realized gaps.
struct TildeGaps {
    double eps = 0.0;
    std::size_t best_relaxed = 0;                       // position of G*_eps
    std::vector<double> group_gap;                      // Delta~_G by group position
    double uniqueness_gap = 0.0;                        // Delta~_0
    std::vector<std::vector<double>> bucket_offset;     // Delta~'_{G,i}, i = 0..m
    std::vector<std::vector<double>> combined;          // Delta~_{G,i}, i = 0..m
};

TildeGaps tilde_gaps(const BanditInstance& instance, const RunParams& params);

struct BoundReport {
    double instance_bound = 0.0;  // sum over groups and buckets 1..m
    double weakened = 0.0;        // d |G| / (eps^2 Delta^2) (L^2 + L lnln(1/Delta)), L = ln(|G|/delta)
};

BoundReport two_step_bound(const BanditInstance& instance, const RunParams& params, double c,
                             double d = 1.0);
double weakened_bound(std::size_t num_groups, double eps, double gap, double delta, double d);

struct EpochRecord {
    double eps;
    double gap;
    std::size_t arms_per_group;
    std::uint64_t pulls;
    std::uint64_t rounds;
    std::vector<GroupId> entering;
    std::vector<GroupId> survivors;
    bool event_a;
    bool event_b;
    std::size_t max_bucket;
};

struct TrialResult {
    GroupId chosen = 0;
    bool success = false;
    std::uint64_t total_pulls = 0;
    std::uint64_t rounds = 0;
    bool event_a = true;           // every epoch
    bool event_b = true;           // every epoch
    std::size_t max_bucket = 0;    // largest |S_{H,i}| over groups and epochs
    bool partition_ok = true;      // every bucket <= 3 eps N in every epoch
    std::uint64_t shortcut_mismatches = 0;
    std::vector<EpochRecord> epochs;
    std::vector<RoundTelemetry> round_log;  // filled when requested
    std::vector<PullRecord> pull_log;       // filled when requested
};

struct RunOptions {
    bool noiseless = false;
    bool record_rounds = false;
    bool record_pulls = false;
};

/// Two-step algorithm: request N arms from every group, then run finite elimination.
TrialResult run_main(const BanditInstance& instance, const RunParams& params, Rng& rng,
                     const RunOptions& options = {});

struct Schedule {
    std::vector<double> eps;
    std::vector<double> gap;

    void validate(double alpha, double delta) const;
};

/// Multi-step variant with decreasing (eps_k, Delta_k). Groups removed by an
/// epoch's elimination stay removed; each epoch draws fresh arms.
TrialResult run_multistep(const BanditInstance& instance, const Schedule& schedule, double delta,
                          Rng& rng, const RunOptions& options = {});

/// First epoch k (1-based) with Delta~_G at eps_k above Delta_k, else K.
std::vector<std::size_t> k_max(const BanditInstance& instance, const Schedule& schedule,
                               double delta);

double multistep_bound(const BanditInstance& instance, const Schedule& schedule, double delta,
                        double c);

}  // namespace gmq
