#include <benchmark/benchmark.h>

#include <random>

#include "uwbfp/eval.hpp"
#include "uwbfp/learners.hpp"

using namespace uwbfp;

namespace {

const TrainingSet& grid_rows() {
  static const TrainingSet rows =
      training_set_from_db(build_db(CalibrationModel::identity(), GridSpec{}, AnchorLayout{}));
  return rows;
}

std::vector<RangeTriple> queries(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.0, 1000.0), uy(0.0, 2000.0);
  const AnchorLayout anchors;
  std::vector<RangeTriple> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(anchors.ranges_from({ux(rng), uy(rng)}));
  return out;
}

void BM_Trilaterate(benchmark::State& state) {
  const AnchorLayout anchors;
  const auto qs = queries(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(trilaterate(anchors, qs[i++ & 1023]));
  }
}
BENCHMARK(BM_Trilaterate);

void BM_BuildDb(benchmark::State& state) {
  const CalibrationModel model = CalibrationModel::identity();
  const GridSpec spec{1000, 2000, static_cast<double>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_db(model, spec, AnchorLayout{}));
  }
}
BENCHMARK(BM_BuildDb)->Arg(25)->Arg(10);

void BM_KnnPredict(benchmark::State& state) {
  const auto knn = KnnClassifier::train(grid_rows(), static_cast<std::size_t>(state.range(0)));
  const auto qs = queries(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(knn.predict_proba(qs[i++ & 1023]));
  }
}
BENCHMARK(BM_KnnPredict)->Arg(1)->Arg(5);

void BM_TreeTrain(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(TreeClassifier::train(grid_rows()));
  }
}
BENCHMARK(BM_TreeTrain)->Unit(benchmark::kMillisecond);

void BM_ForestTrain(benchmark::State& state) {
  ForestParams params;
  params.n_trees = 20;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ForestClassifier::train(grid_rows(), params));
  }
}
BENCHMARK(BM_ForestTrain)->Unit(benchmark::kMillisecond);

void BM_MlPipeline(benchmark::State& state) {
  PipelineConfig cfg;
  cfg.n_trials = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_ml(cfg, AnchorLayout{}, GridSpec{}));
  }
}
BENCHMARK(BM_MlPipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
