#include <doctest.h>

#include "oracles.hpp"

#include <gmq/grouped_infinite.hpp>
#include <gmq/lower_bound.hpp>

#include <cmath>

using namespace gmq;

namespace {

// Likelihood of an observed score under each arm type, summed over the arm's
// prior. Only ratios matter, so the common (q qbar)^#zeros factor is dropped.
double brute_f(int d, double eps, double gap) {
    const double p = (1 + eps) / 2, pb = 1 - p, q = (1 + gap) / 2, qb = 1 - q;
    const double good = p * std::pow(q, d) + pb * std::pow(qb, d);
    const double bad = pb * std::pow(q, d) + p * std::pow(qb, d);
    return good / bad;
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((LBParams{0.25, 0.1, 2}.validate()), ValidationError);
    CHECK_THROWS_AS((LBParams{0.1, 0.0, 2}.validate()), ValidationError);
    CHECK_THROWS_AS((LBParams{0.1, 0.1, 1}.validate()), ValidationError);
    LBParams{0.2, 0.2, 3}.validate();
}

TEST_CASE("instance family") {
    const LBParams p{0.2, 0.2, 2};
    const auto pair = make_worst_case_instances(p);
    REQUIRE(pair.size() == 2);
    for (const auto& inst : pair) {
        CHECK(inst.alpha == 0.5);
        CHECK(inst.groups[0].reservoir.quantile(0.5) == 0.5);
        REQUIRE(inst.groups[1].reservoir.atoms().size() == 2);
        CHECK(inst.groups[1].reservoir.atoms()[0].mean == doctest::Approx(0.4));
        CHECK(inst.groups[1].reservoir.atoms()[1].mean == doctest::Approx(0.6));
    }
    CHECK(pair[0].groups[1].reservoir.atoms()[1].mass == doctest::Approx(0.4));  // bad: few good arms
    CHECK(pair[1].groups[1].reservoir.atoms()[1].mass == doctest::Approx(0.6));
    CHECK(pair[0].groups[1].reservoir.quantile(0.5) == doctest::Approx(0.4));
    CHECK(pair[1].groups[1].reservoir.quantile(0.5) == doctest::Approx(0.6));

    const auto four = make_worst_case_instances({0.1, 0.15, 4});
    REQUIRE(four.size() == 4);
    for (std::size_t j = 0; j < 4; ++j) {
        std::size_t best = 0;
        double top = -1;
        int ties = 0;
        for (std::size_t g = 0; g < 4; ++g) {
            const double m = four[j].groups[g].reservoir.quantile(0.5);
            if (m > top + 1e-12) {
                top = m;
                best = g;
                ties = 1;
            } else if (std::abs(m - top) <= 1e-12) {
                ++ties;
            }
        }
        CHECK(best == j);
        CHECK(ties == 1);
    }
}

TEST_CASE("success sets under the relaxation scale") {
    const LBParams p{0.2, 0.2, 2};
    const auto bad = lb_pair_instance(p, InstanceKind::Bad);
    const auto good = lb_pair_instance(p, InstanceKind::Good);
    CHECK(lb_success_set(bad, p) == std::set<GroupId>{1});
    CHECK(lb_success_set(good, p) == std::set<GroupId>{2});
    // Unscaled, group 2's upper band quantile 0.6 clears 0.5 - 0.2.
    CHECK(lb_success_set(bad, p, 1.0) == std::set<GroupId>{1, 2});
    CHECK_THROWS_AS(lb_success_set(bad, p, 0.5), ValidationError);
}

TEST_CASE("likelihood ratio") {
    const LBParams p{0.2, 0.2, 2};
    CHECK(likelihood_ratio_f(0, p) == 1.0);
    CHECK(likelihood_ratio_f(1, p) == doctest::Approx(oracle::kF_plus1).epsilon(1e-14));
    CHECK(likelihood_ratio_f(-1, p) == doctest::Approx(oracle::kF_minus1).epsilon(1e-14));
    CHECK(likelihood_ratio_f(1, p) - likelihood_ratio_f(-1, p) == doctest::Approx(25.0 / 156.0).epsilon(1e-12));
    for (double e : {0.05, 0.1, 0.2}) {
        for (double g : {0.05, 0.1, 0.2}) {
            const LBParams q{e, g, 2};
            for (int d = -30; d <= 30; ++d) {
                CHECK(std::abs(likelihood_ratio_f(d, q) * likelihood_ratio_f(-d, q) - 1.0) < 1e-12);
                CHECK(likelihood_ratio_f(d, q) == doctest::Approx(brute_f(d, e, g)).epsilon(1e-12));
                CHECK(likelihood_ratio_f(d + 1, q) >= likelihood_ratio_f(d, q));
            }
        }
    }
    // Huge scores stay finite and approach p / pbar.
    CHECK(likelihood_ratio_f(100000, p) == doctest::Approx(0.6 / 0.4));
    CHECK(likelihood_ratio_f(-100000, p) == doctest::Approx(0.4 / 0.6));
}

TEST_CASE("conditional good-arm probability") {
    const LBParams p{0.2, 0.1, 2};
    CHECK(conditional_good_prob(0, p, InstanceKind::Bad) == doctest::Approx(p.pbar()));
    CHECK(conditional_good_prob(0, p, InstanceKind::Good) == doctest::Approx(p.p()));
    const double diff = conditional_good_prob(0, p, InstanceKind::Good) - conditional_good_prob(0, p, InstanceKind::Bad);
    CHECK(diff == doctest::Approx(p.eps));
    CHECK(diff <= 4 * p.eps);
    for (int d = -25; d <= 25; ++d) {
        const double q = p.q(), qb = p.qbar();
        const double direct = p.pbar() * std::pow(q, d) / (p.pbar() * std::pow(q, d) + p.p() * std::pow(qb, d));
        CHECK(conditional_good_prob(d, p, InstanceKind::Bad) == doctest::Approx(direct).epsilon(1e-12));
        const double dg = conditional_good_prob(d, p, InstanceKind::Good) - conditional_good_prob(d, p, InstanceKind::Bad);
        CHECK(dg >= 0.0);
        CHECK(dg <= 4 * p.eps);
    }
}

TEST_CASE("one-step expectations") {
    const LBParams p{0.2, 0.2, 2};
    for (int d = -10; d <= 10; ++d) {
        CHECK(std::abs(expected_next_f(d, p, InstanceKind::Bad) - likelihood_ratio_f(d, p)) < 1e-12);
    }
    CHECK(expected_next_f(0, p, InstanceKind::Good) == doctest::Approx(oracle::kGoodNext_d0).epsilon(1e-12));
    const double ratio = (expected_next_f(0, p, InstanceKind::Good) - 1.0) / (0.04 * 0.04);
    CHECK(ratio == doctest::Approx(oracle::kDriftRatio_d0).epsilon(1e-9));
}

TEST_CASE("drift verification") {
    DriftGrid grid;
    const auto rep = verify_drift(grid, 1);
    CHECK(rep.pass);
    CHECK(rep.rows.size() == 9 * 41);
    CHECK(rep.max_martingale_error < 1e-12);
    CHECK(rep.inf_ratio > -1e-6);
    CHECK(rep.sup_ratio <= 16.0);
    bool found = false;
    for (const auto& r : rep.rows) {
        if (r.eps == 0.2 && r.gap == 0.2 && r.d == 0) {
            CHECK(r.drift_ratio == doctest::Approx(oracle::kDriftRatio_d0).epsilon(1e-9));
            found = true;
        }
        if (r.eps == 0.05 && r.gap == 0.05 && r.d == 0) {
            CHECK(std::isfinite(r.drift_ratio));
            CHECK(r.drift_ratio > 1.0);
            CHECK(r.drift_ratio < 16.0);
        }
    }
    CHECK(found);

    DriftGrid tight = grid;
    tight.c_drift = 1.0;
    const auto fail = verify_drift(tight, 1);
    CHECK_FALSE(fail.pass);
    CHECK_FALSE(fail.failing.empty());

    DriftGrid broken = grid;
    broken.eps = {0.3};
    CHECK_THROWS_AS(verify_drift(broken), ValidationError);
}

TEST_CASE("product statistic and its mean under the bad instance") {
    const LBParams p{0.2, 0.2, 2};
    std::vector<ScoreState> arms(3);
    arms[0].record(1.0);
    arms[0].record(1.0);
    arms[1].record(0.0);
    CHECK(arms[0].d == 2);
    CHECK(arms[1].d == -1);
    CHECK(arms[2].pulls == 0);
    CHECK(product_statistic(arms, p) ==
          doctest::Approx(likelihood_ratio_f(2, p) * likelihood_ratio_f(-1, p)).epsilon(1e-12));

    // Monte Carlo: under the bad instance L_T is a mean-one martingale.
    const auto bad = lb_pair_instance(p, InstanceKind::Bad);
    Rng rng(99);
    const int reps = 20000, arms_n = 3, pulls = 6;
    double sum = 0.0;
    for (int r = 0; r < reps; ++r) {
        std::vector<ScoreState> s(arms_n);
        for (int a = 0; a < arms_n; ++a) {
            const auto arm = sample_arm(bad.groups[1].reservoir, 2, rng);
            for (int t = 0; t < pulls; ++t) s[a].record(sample_reward(bad.family, arm.mean, rng));
        }
        sum += product_statistic(s, p);
    }
    CHECK(sum / reps == doctest::Approx(1.0).epsilon(0.01));
}
