#include <gmq/kernels.hpp>
#include <gmq/lower_bound.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace gmq {

void LBParams::validate() const {
    if (!(eps > 0.0 && eps < 0.25)) throw ValidationError("eps: must lie in (0, 1/4)");
    if (!(gap > 0.0 && gap < 0.25)) throw ValidationError("delta_gap: must lie in (0, 1/4)");
    if (num_groups < 2) throw ValidationError("num_groups: need at least 2 groups");
}

namespace {

ReservoirSpec two_atom(double good_mass, const LBParams& p) {
    return ReservoirSpec::discrete({{p.qbar(), 1.0 - good_mass}, {p.q(), good_mass}});
}

// Ratio r = qbar / q in (0, 1) and |d|; everything below is written in powers of r.
double rpow(std::int64_t d, const LBParams& p) {
    return std::pow(p.qbar() / p.q(), static_cast<double>(d < 0 ? -d : d));
}

}  // namespace

std::vector<BanditInstance> make_worst_case_instances(const LBParams& params) {
    params.validate();
    std::vector<BanditInstance> out;
    for (std::size_t j = 0; j < params.num_groups; ++j) {
        BanditInstance inst;
        inst.id = "lb-" + std::to_string(params.num_groups) + "g-" + std::to_string(j + 1);
        inst.family = RewardFamily::bernoulli();
        inst.alpha = 0.5;
        inst.groups.push_back({1, ReservoirSpec::discrete({{0.5, 1.0}})});
        for (std::size_t g = 1; g < params.num_groups; ++g) {
            const double mass = (j >= 1 && g == j) ? params.p() : params.pbar();
            inst.groups.push_back({static_cast<GroupId>(g + 1), two_atom(mass, params)});
        }
        inst.validate();
        out.push_back(std::move(inst));
    }
    return out;
}

BanditInstance lb_pair_instance(const LBParams& params, InstanceKind kind) {
    LBParams two = params;
    two.num_groups = 2;
    auto all = make_worst_case_instances(two);
    return std::move(all[kind == InstanceKind::Good ? 1 : 0]);
}

std::set<GroupId> lb_success_set(const BanditInstance& instance, const LBParams& params, double scale) {
    if (!(scale >= 1.0)) throw ValidationError("relaxation_scale: must be at least 1");
    return relaxed_success_set(instance, instance.alpha, params.eps / scale, params.gap / scale);
}

double likelihood_ratio_f(std::int64_t d, const LBParams& params) {
    const double p = params.p(), pb = params.pbar();
    const double r = rpow(d, params);
    if (d >= 0) return (p + pb * r) / (pb + p * r);
    return (p * r + pb) / (pb * r + p);
}

double conditional_good_prob(std::int64_t d, const LBParams& params, InstanceKind kind) {
    // Prior weight of a good arm in group 2 under each instance.
    const double prior_good = kind == InstanceKind::Good ? params.p() : params.pbar();
    const double prior_bad = 1.0 - prior_good;
    const double r = rpow(d, params);
    if (d >= 0) return prior_good / (prior_good + prior_bad * r);
    return prior_good * r / (prior_good * r + prior_bad);
}

double expected_next_f(std::int64_t d, const LBParams& params, InstanceKind kind) {
    const double g = conditional_good_prob(d, params, kind);
    const double one = g * params.q() + (1.0 - g) * params.qbar();
    return one * likelihood_ratio_f(d + 1, params) + (1.0 - one) * likelihood_ratio_f(d - 1, params);
}

double product_statistic(std::span<const ScoreState> arms, const LBParams& params) {
    double log_sum = 0.0;
    for (const auto& s : arms) log_sum += std::log(likelihood_ratio_f(s.d, params));
    return std::exp(log_sum);
}

void DriftGrid::validate() const {
    if (eps.empty() || gaps.empty()) throw ValidationError("grid: eps and delta_gap lists must be non-empty");
    for (double e : eps) LBParams{e, 0.1, 2}.validate();
    for (double g : gaps) LBParams{0.1, g, 2}.validate();
    if (d_min > d_max) throw ValidationError("grid.d_range: d_min exceeds d_max");
    if (!(c_drift > 0.0)) throw ValidationError("grid.c_drift: must be positive");
}

std::size_t DriftGrid::size() const noexcept {
    return eps.size() * gaps.size() * static_cast<std::size_t>(d_max - d_min + 1);
}

DriftPoint evaluate_drift_point(const DriftGrid& grid, std::size_t index) {
    const auto span_d = static_cast<std::size_t>(grid.d_max - grid.d_min + 1);
    const std::size_t di = index % span_d;
    const std::size_t gi = (index / span_d) % grid.gaps.size();
    const std::size_t ei = index / (span_d * grid.gaps.size());

    DriftPoint pt;
    pt.eps = grid.eps[ei];
    pt.gap = grid.gaps[gi];
    pt.d = grid.d_min + static_cast<std::int64_t>(di);
    const LBParams params{pt.eps, pt.gap, 2};
    const double f = likelihood_ratio_f(pt.d, params);
    const double scale = pt.eps * pt.eps * pt.gap * pt.gap;
    pt.drift_ratio = (expected_next_f(pt.d, params, InstanceKind::Good) - f) / scale;
    pt.martingale_error = std::abs(expected_next_f(pt.d, params, InstanceKind::Bad) - f);
    // Roundoff of f near 1 leaves the ratio a few ulps below zero at worst.
    const double floor = -grid.martingale_tol / scale;
    pt.pass = pt.drift_ratio >= floor && pt.drift_ratio <= grid.c_drift &&
              pt.martingale_error < grid.martingale_tol;
    return pt;
}

DriftReport summarize_drift(std::vector<DriftPoint> rows) {
    DriftReport rep;
    rep.rows = std::move(rows);
    rep.pass = !rep.rows.empty();
    rep.sup_ratio = -INFINITY;
    rep.inf_ratio = INFINITY;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& r = rep.rows[i];
        rep.sup_ratio = std::max(rep.sup_ratio, r.drift_ratio);
        rep.inf_ratio = std::min(rep.inf_ratio, r.drift_ratio);
        rep.max_martingale_error = std::max(rep.max_martingale_error, r.martingale_error);
        if (!r.pass) {
            rep.pass = false;
            rep.failing.push_back(i);
        }
    }
    return rep;
}

DriftReport verify_drift(const DriftGrid& grid, int threads) {
    grid.validate();
    return summarize_drift(kernels::drift_grid_omp(grid, threads));
}

}  // namespace gmq
