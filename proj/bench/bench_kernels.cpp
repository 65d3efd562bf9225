// Serial reference vs OpenMP path for the hot kernels.
//   ./bench_kernels --benchmark_filter=Count

#include "tcd/hypothesis.hpp"
#include "tcd/kernels.hpp"
#include "tcd/learning.hpp"
#include "tcd/model_io.hpp"
#include "tcd/synthgen.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

namespace {

struct Fixture {
  tcd::BnModel truth;
  tcd::Dataset train;
  tcd::Dataset test;
  tcd::EncodedData encoded;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    auto truth = tcd::load_model(std::filesystem::path(TCD_DATA_DIR) / "baseline.model");
    tcd::GeneratorConfig cfg(truth);
    cfg.scenes = 2000;
    cfg.min_instances = cfg.max_instances = 20;
    cfg.scene_level_nodes = {"Weather", "RoadCondition", "Illumination", "Reflection"};
    cfg.instance_level_nodes = {"Truncation", "Occlusion", "FN"};
    const auto data = tcd::derive_dataset(tcd::group_records(tcd::generate(cfg).records), tcd::MatchConfig{});
    auto parts = tcd::split(data, 0.8, 1);
    auto encoded = tcd::encode(parts.train, truth.structure());
    return Fixture{std::move(truth), std::move(parts.train), std::move(parts.test), std::move(encoded)};
  }();
  return f;
}

tcd::Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? tcd::Execution::Serial : tcd::Execution::Parallel;
}

void BM_CountFamilies(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(tcd::count_families(f.truth.structure(), f.encoded, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.encoded.instance_count()));
}

void BM_ComputeCbls(benchmark::State& state) {
  const auto& f = fixture();
  const auto fn = f.truth.structure().id_of("FN");
  for (auto _ : state) benchmark::DoNotOptimize(tcd::compute_cbls(f.truth, fn, f.encoded, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.encoded.instance_count()));
}

void BM_ScoreScenes(benchmark::State& state) {
  const auto& f = fixture();
  const auto model = tcd::learn_cbts(f.truth.structure(), f.train);
  const tcd::AnalysisConfig cfg{0.05, {"FN"}};
  for (auto _ : state) benchmark::DoNotOptimize(tcd::score_scenes(model, f.train, f.test, cfg, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.test.scenes.size()));
}

}  // namespace

// Arg 0: serial reference, 1: OpenMP.
BENCHMARK(BM_CountFamilies)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ComputeCbls)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScoreScenes)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
