#include <doctest.h>

#include <gmq/instance.hpp>

#include <cmath>

using namespace gmq;

TEST_CASE("discrete reservoir quantile is the infimum over the support") {
    const auto r = ReservoirSpec::discrete({{0.3, 0.5}, {0.7, 0.5}});
    CHECK(r.quantile(0.0) == 0.3);
    CHECK(r.quantile(0.25) == 0.3);
    CHECK(r.quantile(0.5) == 0.3);
    CHECK(r.quantile(0.5 + 1e-6) == 0.7);
    CHECK(r.quantile(1.0) == 0.7);
    CHECK(r.cdf(0.29) == 0.0);
    CHECK(r.cdf(0.3) == 0.5);
    CHECK(r.cdf(0.9) == 1.0);
}

TEST_CASE("quantile level computed with representation error still hits the atom boundary") {
    const auto r = ReservoirSpec::discrete({{0.1, 0.3}, {0.2, 0.3}, {0.9, 0.4}});
    // 0.1 + 0.2 is 0.30000000000000004 in binary floating point.
    CHECK(r.quantile(0.1 + 0.2) == 0.1);
    CHECK(r.quantile(1.0 - 0.5 + 0.1) == 0.2);
    CHECK(r.quantile(0.6 + 1e-9) == 0.9);
}

TEST_CASE("piecewise linear reservoir inverts its CDF") {
    const auto u = ReservoirSpec::piecewise_linear({{0.0, 0.0}, {1.0, 1.0}});
    CHECK(u.quantile(0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(u.cdf(0.25) == doctest::Approx(0.25));
    const auto flat = ReservoirSpec::piecewise_linear({{0.2, 0.0}, {0.4, 0.5}, {0.6, 0.5}, {0.8, 1.0}});
    CHECK(flat.quantile(0.5) == doctest::Approx(0.4));
    CHECK(flat.quantile(0.75) == doctest::Approx(0.7));
    CHECK(flat.min_mean() == 0.2);
    CHECK(flat.max_mean() == 0.8);
}

TEST_CASE("reservoir construction rejects malformed input with a field path") {
    CHECK_THROWS_AS(ReservoirSpec::discrete({}), ValidationError);
    CHECK_THROWS_AS(ReservoirSpec::discrete({{0.5, 0.4}}), ValidationError);
    CHECK_THROWS_AS(ReservoirSpec::discrete({{0.5, 0.5}, {0.4, 0.5}}), ValidationError);
    CHECK_THROWS_AS(ReservoirSpec::discrete({{1.5, 1.0}}), ValidationError);
    CHECK_THROWS_AS(ReservoirSpec::piecewise_linear({{0.0, 0.0}, {1.0, 0.9}}), ValidationError);
    try {
        ReservoirSpec::discrete({{0.1, 0.5}, {0.1, 0.5}});
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).rfind("atoms[1].mean", 0) == 0);
    }
}

TEST_CASE("finite means merge duplicates into atoms with matching mass") {
    const auto r = ReservoirSpec::from_finite_means({0.4, 0.2, 0.4, 0.8});
    REQUIRE(r.atoms().size() == 3);
    CHECK(r.atoms()[1].mean == 0.4);
    CHECK(r.atoms()[1].mass == doctest::Approx(0.5));
    CHECK(r.quantile(0.5) == 0.4);
}

TEST_CASE("sampled arms carry their hidden index and matching mean") {
    const auto r = ReservoirSpec::discrete({{0.3, 0.5}, {0.7, 0.5}});
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto a = sample_arm(r, 4, rng);
        CHECK(a.group == 4);
        CHECK(a.hidden_index >= 0.0);
        CHECK(a.hidden_index < 1.0);
        CHECK(a.mean == r.quantile(a.hidden_index));
    }
    CHECK(arm_at(r, 1, 0.75).mean == 0.7);
}

TEST_CASE("reward draws") {
    Rng rng(5);
    CHECK(sample_reward(RewardFamily::bernoulli(), 0.37, rng, true) == 0.37);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double x = sample_reward(RewardFamily::bernoulli(), 0.3, rng);
        CHECK((x == 0.0 || x == 1.0));
        sum += x;
    }
    CHECK(sum / 20000 == doctest::Approx(0.3).epsilon(0.05));
    double g = 0.0;
    for (int i = 0; i < 20000; ++i) g += sample_reward(RewardFamily::gaussian(0.25), 0.6, rng);
    CHECK(g / 20000 == doctest::Approx(0.6).epsilon(0.02));
    CHECK_THROWS_AS(RewardFamily::gaussian(1.5), ValidationError);
    CHECK_THROWS_AS(sample_reward(RewardFamily::bernoulli(), 1.2, rng), ValidationError);
}

TEST_CASE("instance validation and lookup") {
    BanditInstance inst;
    CHECK_THROWS_AS(inst.validate(), ValidationError);
    inst.groups.push_back({1, ReservoirSpec::discrete({{0.5, 1.0}})});
    inst.groups.push_back({1, ReservoirSpec::discrete({{0.5, 1.0}})});
    CHECK_THROWS_AS(inst.validate(), ValidationError);
    inst.groups[1].id = 7;
    inst.validate();
    CHECK(inst.index_of(7) == 1);
    CHECK_THROWS_AS(inst.index_of(3), ValidationError);
}

TEST_CASE("relaxed success set") {
    BanditInstance inst;
    inst.groups.push_back({1, ReservoirSpec::discrete({{0.5, 1.0}})});
    inst.groups.push_back({2, ReservoirSpec::discrete({{0.4, 0.6}, {0.6, 0.4}})});
    // Group 2 median level band [0.3, 0.7] maps to quantiles 0.4 and 0.6.
    CHECK(relaxed_success_set(inst, 0.5, 0.2, 0.2) == std::set<GroupId>{1, 2});
    CHECK(relaxed_success_set(inst, 0.5, 0.05, 0.05) == std::set<GroupId>{1});
    CHECK_THROWS_AS(relaxed_success_set(inst, 0.5, 0.5, 0.1), ValidationError);
    CHECK_THROWS_AS(relaxed_success_set(inst, 0.5, 0.1, 0.0), ValidationError);
}
