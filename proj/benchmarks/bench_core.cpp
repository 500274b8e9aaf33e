#include <benchmark/benchmark.h>

#include "clab/codec.hpp"
#include "clab/golden.hpp"
#include "clab/grammar.hpp"
#include "clab/objectives.hpp"
#include "clab/rng.hpp"
#include "clab/surface.hpp"
#include "clab/train.hpp"

namespace {

void BM_Step(benchmark::State& state) {
  const clab::LstmParams g = clab::build_golden();
  clab::LstmState s = clab::LstmState::zeros(3);
  for (auto _ : state) {
    clab::StepResult r = clab::step(g, s, clab::Symbol::A);
    benchmark::DoNotOptimize(r.dist);
  }
}
BENCHMARK(BM_Step);

void BM_CeTrainingSet(benchmark::State& state) {
  const clab::LstmParams g = clab::build_golden();
  const clab::Dataset train = clab::sample_training({0.3, 1}, 950);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clab::ce_mean(g, train));
  }
}
BENCHMARK(BM_CeTrainingSet);

void BM_Rationalize(benchmark::State& state) {
  clab::Rng rng(7);
  std::vector<double> xs(256);
  for (double& x : xs) x = rng.uniform(-300.0, 300.0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(clab::rationalize(xs[i++ % xs.size()], 1000));
  }
}
BENCHMARK(BM_Rationalize);

void BM_DescriptionLength(benchmark::State& state) {
  const clab::LstmParams net = clab::init_params(3, clab::InitScheme::Normal, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clab::description_length(net, 1000));
  }
}
BENCHMARK(BM_DescriptionLength);

void BM_SurfaceMdl(benchmark::State& state) {
  const clab::LstmParams g = clab::build_golden();
  const clab::Dataset train = clab::sample_training({0.3, 1}, 950);
  const clab::Dataset test = clab::build_test(1, 10);
  clab::SurfaceOptions opt;
  opt.grid = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(clab::explore(g, {clab::ObjectiveKind::Mdl, 0.0, 1000}, train, test, 1, 2, opt));
  }
}
BENCHMARK(BM_SurfaceMdl)->Arg(11)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_TrainEpochs(benchmark::State& state) {
  clab::TrainConfig cfg;
  cfg.train_size = 1000;
  cfg.seed = 100;
  cfg.epochs = static_cast<int>(state.range(0));
  const clab::SplitData split = clab::make_split({cfg.p, cfg.seed}, cfg.train_size, 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clab::train(cfg, split));
  }
}
BENCHMARK(BM_TrainEpochs)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
