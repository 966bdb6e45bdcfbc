#include <gmq/instance.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace gmq {

namespace {

// Slack on probability comparisons so that levels like 0.5 + 0.2 land on the
// cumulative mass 0.7 they were meant to hit.
constexpr double kProbTol = 1e-12;

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

}  // namespace

RewardFamily RewardFamily::gaussian(double sigma2) {
    RewardFamily f{RewardKind::GaussianFixedVariance, sigma2};
    f.validate();
    return f;
}

void RewardFamily::validate() const {
    if (kind == RewardKind::GaussianFixedVariance) {
        require(sigma2 > 0.0 && sigma2 <= 1.0, "family.sigma2: must lie in (0, 1]");
    }
}

ReservoirSpec ReservoirSpec::discrete(std::vector<Atom> atoms) {
    require(!atoms.empty(), "atoms: reservoir needs at least one atom");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const auto& a = atoms[i];
        const std::string at = "atoms[" + std::to_string(i) + "]";
        require(a.mean >= 0.0 && a.mean <= 1.0, at + ".mean: must lie in [0, 1]");
        require(a.mass > 0.0 && a.mass <= 1.0, at + ".mass: must lie in (0, 1]");
        if (i > 0) require(a.mean > atoms[i - 1].mean, at + ".mean: means must be strictly increasing");
        total += a.mass;
    }
    require(std::abs(total - 1.0) <= 1e-12, "atoms: masses must sum to 1");

    ReservoirSpec spec;
    spec.atoms_ = std::move(atoms);
    spec.cumulative_.reserve(spec.atoms_.size());
    double acc = 0.0;
    for (const auto& a : spec.atoms_) {
        acc += a.mass;
        spec.cumulative_.push_back(acc);
    }
    spec.cumulative_.back() = 1.0;
    return spec;
}

ReservoirSpec ReservoirSpec::piecewise_linear(std::vector<Breakpoint> breakpoints) {
    require(breakpoints.size() >= 2, "cdf: need at least two breakpoints");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        const auto& b = breakpoints[i];
        const std::string at = "cdf[" + std::to_string(i) + "]";
        require(b.x >= 0.0 && b.x <= 1.0, at + ".x: must lie in [0, 1]");
        require(b.cdf >= 0.0 && b.cdf <= 1.0, at + ".cdf: must lie in [0, 1]");
        if (i > 0) {
            require(b.x > breakpoints[i - 1].x, at + ".x: must be strictly increasing");
            require(b.cdf >= breakpoints[i - 1].cdf, at + ".cdf: must be nondecreasing");
        }
    }
    require(std::abs(breakpoints.front().cdf) <= 1e-12, "cdf[0].cdf: must be 0");
    require(std::abs(breakpoints.back().cdf - 1.0) <= 1e-12, "cdf[last].cdf: must be 1");
    breakpoints.front().cdf = 0.0;
    breakpoints.back().cdf = 1.0;

    ReservoirSpec spec;
    spec.breakpoints_ = std::move(breakpoints);
    return spec;
}

ReservoirSpec ReservoirSpec::from_finite_means(std::vector<double> means) {
    require(!means.empty(), "arms: finite group must be nonempty");
    std::sort(means.begin(), means.end());
    const double w = 1.0 / static_cast<double>(means.size());
    std::vector<Atom> atoms;
    for (double m : means) {
        if (!atoms.empty() && atoms.back().mean == m) {
            atoms.back().mass += w;
        } else {
            atoms.push_back({m, w});
        }
    }
    double total = 0.0;
    for (const auto& a : atoms) total += a.mass;
    atoms.back().mass += 1.0 - total;
    return discrete(std::move(atoms));
}

double ReservoirSpec::cdf(double x) const {
    if (is_discrete()) {
        auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                                   [](double v, const Atom& a) { return v < a.mean; });
        if (it == atoms_.begin()) return 0.0;
        return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
    }
    const auto& bp = breakpoints_;
    if (x < bp.front().x) return 0.0;
    if (x >= bp.back().x) return 1.0;
    auto it = std::upper_bound(bp.begin(), bp.end(), x,
                               [](double v, const Breakpoint& b) { return v < b.x; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    return lo.cdf + (hi.cdf - lo.cdf) * (x - lo.x) / (hi.x - lo.x);
}

double ReservoirSpec::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p: quantile level must lie in [0, 1]");
    if (is_discrete()) {
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), p - kProbTol);
        if (it == cumulative_.end()) --it;
        return atoms_[static_cast<std::size_t>(it - cumulative_.begin())].mean;
    }
    const auto& bp = breakpoints_;
    auto it = std::find_if(bp.begin(), bp.end(),
                           [p](const Breakpoint& b) { return b.cdf >= p - kProbTol; });
    if (it == bp.begin()) return bp.front().x;
    if (it == bp.end()) return bp.back().x;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double frac = (p - lo.cdf) / (hi.cdf - lo.cdf);
    return std::clamp(lo.x + frac * (hi.x - lo.x), lo.x, hi.x);
}

double ReservoirSpec::min_mean() const {
    return is_discrete() ? atoms_.front().mean : breakpoints_.front().x;
}

double ReservoirSpec::max_mean() const {
    return is_discrete() ? atoms_.back().mean : breakpoints_.back().x;
}

void BanditInstance::validate() const {
    require(!groups.empty(), "groups: instance needs at least one group");
    require(alpha > 0.0 && alpha < 1.0, "alpha: must lie in (0, 1)");
    family.validate();
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            require(groups[k].id != groups[i].id,
                    "groups[" + std::to_string(i) + "].id: duplicate group id");
        }
    }
}

std::size_t BanditInstance::index_of(GroupId gid) const {
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].id == gid) return i;
    }
    throw ValidationError("group id " + std::to_string(gid) + ": not in instance");
}

double reservoir_quantile(const ReservoirSpec& spec, double p) { return spec.quantile(p); }

ArmIdentity arm_at(const ReservoirSpec& spec, GroupId group, double hidden_index) {
    return {group, hidden_index, spec.quantile(hidden_index)};
}

ArmIdentity sample_arm(const ReservoirSpec& spec, GroupId group, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return arm_at(spec, group, unit(rng));
}

double sample_reward(const RewardFamily& family, double mean, Rng& rng, bool noiseless) {
    if (!(mean >= 0.0 && mean <= 1.0)) throw ValidationError("mean: must lie in [0, 1]");
    if (noiseless) return mean;
    switch (family.kind) {
        case RewardKind::Bernoulli: {
            std::bernoulli_distribution coin(mean);
            return coin(rng) ? 1.0 : 0.0;
        }
        case RewardKind::GaussianFixedVariance: {
            std::normal_distribution<double> normal(mean, std::sqrt(family.sigma2));
            return normal(rng);
        }
    }
    return mean;
}

std::set<GroupId> relaxed_success_set(const BanditInstance& instance, double alpha, double eps,
                                      double gap) {
    require(eps > 0.0 && eps < std::min(alpha, 1.0 - alpha),
            "eps: must satisfy 0 < eps < min(alpha, 1 - alpha)");
    require(gap > 0.0, "delta_gap: must be positive");
    double best_low = -std::numeric_limits<double>::infinity();
    for (const auto& g : instance.groups) {
        best_low = std::max(best_low, g.reservoir.quantile(1.0 - alpha - eps));
    }
    std::set<GroupId> out;
    for (const auto& g : instance.groups) {
        if (g.reservoir.quantile(1.0 - alpha + eps) >= best_low - gap) out.insert(g.id);
    }
    return out;
}

}  // namespace gmq
