// Microbenchmarks for the hot paths: distance kernels, the two estimators on
// a realistic cross-section, and panel synthesis. Build with
// -DGRAVITY_BUILD_BENCHMARKS=ON and run build/benchmarks/gravity_bench.

#include "gravity/design.hpp"
#include "gravity/dgp.hpp"
#include "gravity/estimators.hpp"
#include "gravity/geodesy.hpp"
#include "gravity/harness.hpp"
#include "gravity/panel.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

const gravity::PanelDataset& demo_panel() {
    static const gravity::PanelDataset panel =
        gravity::load_panel(GRAVITY_DEMO_DIR, gravity::DistanceMeasure::capital);
    return panel;
}

gravity::DesignMatrix demo_design(gravity::EstimatorKind estimator) {
    gravity::ModelSpec spec = gravity::ModelSpec::defaults_for(estimator);
    spec.sector = gravity::Sector::manufacturing;
    const auto obs = gravity::pair_observations(demo_panel(), 1995, spec.sector);
    return gravity::build_design(obs, spec);
}

void BM_Haversine(benchmark::State& state) {
    const gravity::GeoPoint washington{38.9072, -77.0369};
    const gravity::GeoPoint beijing{39.9042, 116.4074};
    for (auto _ : state)
        benchmark::DoNotOptimize(gravity::haversine_km(washington, beijing));
}
BENCHMARK(BM_Haversine);

void BM_WeightedCityDistance(benchmark::State& state) {
    gravity::CountryRecord a;
    a.iso3 = "AAA";
    for (int i = 0; i < 8; ++i)
        a.cities.push_back({"a" + std::to_string(i), 10.0 + i, 20.0 + i, 0.125});
    gravity::CountryRecord b;
    b.iso3 = "BBB";
    for (int i = 0; i < 8; ++i)
        b.cities.push_back({"b" + std::to_string(i), -5.0 - i, 100.0 + i, 0.125});
    for (auto _ : state)
        benchmark::DoNotOptimize(gravity::weighted_city_distance(a, b));
}
BENCHMARK(BM_WeightedCityDistance);

void BM_OlsFit(benchmark::State& state) {
    const gravity::DesignMatrix d = demo_design(gravity::EstimatorKind::ols);
    for (auto _ : state) benchmark::DoNotOptimize(gravity::ols_fit(d));
}
BENCHMARK(BM_OlsFit);

void BM_PpmlFit(benchmark::State& state) {
    const gravity::DesignMatrix d = demo_design(gravity::EstimatorKind::ppml);
    for (auto _ : state) benchmark::DoNotOptimize(gravity::ppml_fit(d));
}
BENCHMARK(BM_PpmlFit);

void BM_BuildDesign(benchmark::State& state) {
    const gravity::ModelSpec spec =
        gravity::ModelSpec::defaults_for(gravity::EstimatorKind::ols);
    const auto obs =
        gravity::pair_observations(demo_panel(), 1995, gravity::Sector::total);
    for (auto _ : state)
        benchmark::DoNotOptimize(gravity::build_design(obs, spec));
}
BENCHMARK(BM_BuildDesign);

void BM_SimulatePanel(benchmark::State& state) {
    gravity::DGPConfig config;
    config.countries = static_cast<int>(state.range(0));
    config.first_year = 1991;
    config.last_year = 2006;
    config.sigma = 1.0;
    config.seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(gravity::simulate_panel(config));
}
BENCHMARK(BM_SimulatePanel)->Arg(10)->Arg(30);

void BM_CrossSections(benchmark::State& state) {
    const gravity::ModelSpec spec =
        gravity::ModelSpec::defaults_for(gravity::EstimatorKind::ols);
    for (auto _ : state)
        benchmark::DoNotOptimize(gravity::run_cross_sections(
            demo_panel(), spec, {1991, 2006}, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CrossSections)->Arg(1)->Arg(4);

} // namespace

BENCHMARK_MAIN();
