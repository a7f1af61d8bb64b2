#include <benchmark/benchmark.h>

#include <random>

#include "hermflow/catalog.hpp"
#include "hermflow/flow.hpp"
#include "hermflow/hopf.hpp"
#include "hermflow/oracle.hpp"
#include "hermflow/positivity.hpp"

using namespace hermflow;

namespace {

hopf::Point point(int n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    hopf::Point z(static_cast<std::size_t>(n));
    for (auto& c : z) c = {U(rng), U(rng)};
    return z;
}

}  // namespace

static void BM_HopfBismutMixed(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const hopf::HopfMetric h{n, 1, 0.3};
    const auto z = point(n);
    for (auto _ : state) benchmark::DoNotOptimize(hopf::bismut_mixed(h, z));
}
BENCHMARK(BM_HopfBismutMixed)->DenseRange(2, 6);

static void BM_FdCurvature(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const hopf::HopfMetric h{n, 1, 0.3};
    const oracle::PointMetricField f{n, [h](const oracle::Point& p) { return hopf::metric(h, p); }, std::nullopt};
    const auto z = point(n);
    for (auto _ : state) benchmark::DoNotOptimize(oracle::fd_curvature(f, z));
}
BENCHMARK(BM_FdCurvature)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_InvariantBismutCurvature(benchmark::State& state) {
    const auto br = dualize(catalog::instantiate(catalog::family("Np"), {{"rho", 1.0}}));
    std::mt19937_64 rng(7);
    const Tensor g = frame_metric(catalog::sample_metric(rng));
    for (auto _ : state) benchmark::DoNotOptimize(curvature(connection(ConnectionKind::Bismut, br, g), br, g));
}
BENCHMARK(BM_InvariantBismutCurvature)->Unit(benchmark::kMicrosecond);

static void BM_Classify(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Tensor M = hopf::bismut_mixed({n, 1, -0.3}, point(n));
    for (auto _ : state) benchmark::DoNotOptimize(positivity::classify(M));
}
BENCHMARK(BM_Classify)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void BM_IntegrateHopfFlow(benchmark::State& state) {
    const auto fc = flow::named_flow("pluriclosed");
    for (auto _ : state) benchmark::DoNotOptimize(flow::integrate(1, 0.5, fc, 3, 10, 1e-3));
}
BENCHMARK(BM_IntegrateHopfFlow)->Unit(benchmark::kMillisecond);

static void BM_IntegrateInvariantFlow(benchmark::State& state) {
    const auto eqs = catalog::instantiate(catalog::family("Siv3"), {{"A", 2.0}});
    std::mt19937_64 rng(7);
    const auto m0 = catalog::sample_metric(rng, catalog::MetricSlice::parse({"u", "v", "z"}));
    const auto fc = flow::named_flow("pluriclosed");
    for (auto _ : state) benchmark::DoNotOptimize(integrate_invariant_flow(eqs, m0, fc, 0.1, 1e-3));
}
BENCHMARK(BM_IntegrateInvariantFlow)->Unit(benchmark::kMillisecond);

static void BM_Table3Row(benchmark::State& state) {
    const auto rows = catalog::load_expected(catalog::builtin_expected_json());
    const std::vector<catalog::ExpectedRow> one{rows[static_cast<std::size_t>(state.range(0))]};
    catalog::Table3Options opt;
    opt.samples = catalog::kMinSamples;
    for (auto _ : state) benchmark::DoNotOptimize(catalog::regenerate_table3(opt, one));
    state.SetLabel(one.front().id);
}
BENCHMARK(BM_Table3Row)->Arg(1)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
