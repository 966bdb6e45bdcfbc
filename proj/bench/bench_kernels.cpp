// Serial reference kernels against their OpenMP counterparts.
#include <gmq/kernels.hpp>

#include <benchmark/benchmark.h>

namespace {

gmq::BanditInstance three_groups() {
    gmq::BanditInstance inst;
    inst.id = "bench";
    inst.alpha = 0.5;
    inst.groups.push_back({1, gmq::ReservoirSpec::discrete({{0.3, 0.5}, {0.7, 0.5}})});
    inst.groups.push_back({2, gmq::ReservoirSpec::discrete({{0.2, 0.5}, {0.5, 0.5}})});
    inst.groups.push_back({3, gmq::ReservoirSpec::piecewise_linear({{0.0, 0.0}, {0.6, 1.0}})});
    return inst;
}

gmq::TrialSpec trial_spec() {
    gmq::TrialSpec s;
    s.instance = three_groups();
    s.params = {0.5, 0.2, 0.1, 0.1};
    return s;
}

constexpr std::size_t kTrials = 32;
constexpr std::size_t kResamples = 2000;

void BM_TrialsSerial(benchmark::State& st) {
    const auto spec = trial_spec();
    for (auto _ : st) benchmark::DoNotOptimize(gmq::kernels::run_trials_serial(spec, kTrials, 7));
}

void BM_TrialsOmp(benchmark::State& st) {
    const auto spec = trial_spec();
    const int threads = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(gmq::kernels::run_trials_omp(spec, kTrials, 7, threads));
}

void BM_ResampleSerial(benchmark::State& st) {
    const auto inst = three_groups();
    for (auto _ : st) benchmark::DoNotOptimize(gmq::kernels::resample_events_serial(inst, 0.1, 0.05, kResamples, 3));
}

void BM_ResampleOmp(benchmark::State& st) {
    const auto inst = three_groups();
    const int threads = static_cast<int>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(gmq::kernels::resample_events_omp(inst, 0.1, 0.05, kResamples, 3, threads));
}

gmq::DriftGrid wide_grid() {
    gmq::DriftGrid g;
    g.eps.clear();
    g.gaps.clear();
    for (int i = 1; i <= 24; ++i) {
        g.eps.push_back(0.01 * i);
        g.gaps.push_back(0.01 * i);
    }
    g.d_min = -200;
    g.d_max = 200;
    return g;
}

void BM_DriftSerial(benchmark::State& st) {
    const auto grid = wide_grid();
    for (auto _ : st) benchmark::DoNotOptimize(gmq::kernels::drift_grid_serial(grid));
}

void BM_DriftOmp(benchmark::State& st) {
    const auto grid = wide_grid();
    const int threads = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(gmq::kernels::drift_grid_omp(grid, threads));
}

}  // namespace

BENCHMARK(BM_TrialsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsOmp)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ResampleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResampleOmp)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DriftSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DriftOmp)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
