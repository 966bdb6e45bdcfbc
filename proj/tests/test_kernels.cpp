#include <doctest.h>

#include <gmq/kernels.hpp>

using namespace gmq;

namespace {

TrialSpec small_spec(RunMode mode) {
    TrialSpec s;
    s.instance.id = "k";
    s.instance.groups.push_back({1, ReservoirSpec::discrete({{0.3, 0.5}, {0.7, 0.5}})});
    s.instance.groups.push_back({2, ReservoirSpec::discrete({{0.2, 0.5}, {0.5, 0.5}})});
    s.instance.groups.push_back({3, ReservoirSpec::piecewise_linear({{0.0, 0.0}, {0.6, 1.0}})});
    s.mode = mode;
    s.params = {0.5, 0.2, 0.15, 0.1};
    s.schedule = {{0.2, 0.15}, {0.2, 0.15}};
    return s;
}

void same_trials(const std::vector<TrialResult>& a, const std::vector<TrialResult>& b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].chosen == b[i].chosen);
        CHECK(a[i].success == b[i].success);
        CHECK(a[i].total_pulls == b[i].total_pulls);
        CHECK(a[i].rounds == b[i].rounds);
        CHECK(a[i].event_a == b[i].event_a);
        CHECK(a[i].max_bucket == b[i].max_bucket);
        CHECK(a[i].epochs.size() == b[i].epochs.size());
    }
}

}  // namespace

TEST_CASE("trial fan-out matches the serial reference") {
    for (auto mode : {RunMode::TwoStep, RunMode::MultiStep}) {
        const auto spec = small_spec(mode);
        const auto ref = kernels::run_trials_serial(spec, 12, 31);
        for (int threads : {1, 2, 4, 8}) same_trials(ref, kernels::run_trials_omp(spec, 12, 31, threads));
    }
}

TEST_CASE("trial fan-out propagates validation errors") {
    auto spec = small_spec(RunMode::TwoStep);
    spec.params.delta = 0.5;
    CHECK_THROWS_AS(kernels::run_trials_omp(spec, 4, 1, 2), ValidationError);
    CHECK_THROWS_AS(kernels::run_trials_serial(spec, 4, 1), ValidationError);
}

TEST_CASE("resample estimators match the serial reference") {
    const auto inst = small_spec(RunMode::TwoStep).instance;
    const auto ref = kernels::resample_events_serial(inst, 0.1, 0.05, 300, 5);
    CHECK(ref.resamples == 300);
    for (int threads : {1, 3, 8}) CHECK(kernels::resample_events_omp(inst, 0.1, 0.05, 300, 5, threads) == ref);
}

TEST_CASE("event A frequency on a two-atom reservoir") {
    // Two copies of the reservoir so that N = 220.
    BanditInstance two;
    const auto r = ReservoirSpec::discrete({{0.3, 0.5}, {0.7, 0.5}});
    two.groups = {{1, r}, {2, r}};
    REQUIRE(compute_N(0.1, 0.05, 2) == 220);
    const auto c = kernels::resample_events_omp(two, 0.1, 0.05, 1000, 12, 0);
    CHECK(double(c.event_a) / 1000.0 >= 0.95);
}

TEST_CASE("drift grid matches the serial reference") {
    DriftGrid g;
    g.eps = {0.03, 0.11, 0.24};
    g.gaps = {0.07, 0.2};
    g.d_min = -40;
    g.d_max = 35;
    const auto ref = kernels::drift_grid_serial(g);
    REQUIRE(ref.size() == g.size());
    for (int threads : {1, 4}) {
        const auto got = kernels::drift_grid_omp(g, threads);
        REQUIRE(got.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(got[i].d == ref[i].d);
            CHECK(got[i].drift_ratio == ref[i].drift_ratio);
            CHECK(got[i].martingale_error == ref[i].martingale_error);
        }
    }
    CHECK(ref.front().d == -40);
    CHECK(ref.back().eps == 0.24);
    CHECK(ref.back().gap == 0.2);
}
