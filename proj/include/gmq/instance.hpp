#pragma once

#include <gmq/rng.hpp>

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gmq {

/// Raised for malformed inputs. The message starts with the offending field path.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using GroupId = int;

enum class RewardKind { Bernoulli, GaussianFixedVariance };

/// Reward distribution family, uniquely parameterized by the arm mean.
struct RewardFamily {
    RewardKind kind = RewardKind::Bernoulli;
    double sigma2 = 1.0;  // Gaussian only, in (0, 1]

    static RewardFamily bernoulli() { return {RewardKind::Bernoulli, 1.0}; }
    static RewardFamily gaussian(double sigma2);

    void validate() const;
};

struct Atom {
    double mean;
    double mass;
};

struct Breakpoint {
    double x;    // mean value in [0,1]
    double cdf;  // F(x)
};

/// Distribution of arm means inside one group. Either a finite list of atoms or a
/// piecewise-linear CDF. Immutable once built.
class ReservoirSpec {
public:
    /// Atoms must have strictly increasing means in [0,1] and masses summing to 1 (1e-12).
    static ReservoirSpec discrete(std::vector<Atom> atoms);
    /// Breakpoints with strictly increasing x in [0,1], nondecreasing F, F(first)=0, F(last)=1.
    static ReservoirSpec piecewise_linear(std::vector<Breakpoint> breakpoints);
    /// Uniform atoms over a finite multiset of means (duplicates are merged).
    static ReservoirSpec from_finite_means(std::vector<double> means);

    bool is_discrete() const noexcept { return !atoms_.empty(); }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    const std::vector<Breakpoint>& breakpoints() const noexcept { return breakpoints_; }

    double cdf(double x) const;
    /// inf{ mu in support : F(mu) >= p }.
    double quantile(double p) const;
    double min_mean() const;
    double max_mean() const;

private:
    std::vector<Atom> atoms_;
    std::vector<double> cumulative_;
    std::vector<Breakpoint> breakpoints_;
};

struct Group {
    GroupId id;
    ReservoirSpec reservoir;
};

/// Reward family plus per-group reservoirs and the quantile level alpha.
struct BanditInstance {
    std::string id = "instance";
    std::vector<Group> groups;
    RewardFamily family;
    double alpha = 0.5;

    void validate() const;
    std::size_t index_of(GroupId gid) const;
};

/// Oracle-side record of a requested arm. Algorithms only ever see an opaque index.
struct ArmIdentity {
    GroupId group;
    double hidden_index;  // j in [0,1]
    double mean;          // reservoir quantile at j
};

double reservoir_quantile(const ReservoirSpec& spec, double p);

ArmIdentity sample_arm(const ReservoirSpec& spec, GroupId group, Rng& rng);
/// Arm with a caller-chosen hidden index (j is not drawn).
ArmIdentity arm_at(const ReservoirSpec& spec, GroupId group, double hidden_index);

/// One reward draw. `noiseless` returns the mean itself.
double sample_reward(const RewardFamily& family, double mean, Rng& rng, bool noiseless = false);

/// Exact set of groups G with F_G^{-1}(1-a+eps) >= max_G' F_G'^{-1}(1-a-eps) - gap.
std::set<GroupId> relaxed_success_set(const BanditInstance& instance, double alpha, double eps,
                                      double gap);

}  // namespace gmq
