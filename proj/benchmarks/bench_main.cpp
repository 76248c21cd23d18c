#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "mae/advantage.hpp"
#include "mae/config.hpp"
#include "mae/orchestrator.hpp"
#include "mae/runner.hpp"
#include "mae/structured_output.hpp"

namespace {

void BM_ExtractTagged(benchmark::State& state) {
  std::string doc;
  for (int i = 0; i < state.range(0); ++i) doc += "reasoning step " + std::to_string(i) + " <answer>" + std::to_string(i) + "</answer>\n";
  for (auto _ : state) benchmark::DoNotOptimize(mae::extract_tagged(doc, "answer"));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * doc.size()));
}
BENCHMARK(BM_ExtractTagged)->Arg(1)->Arg(16)->Arg(256);

void BM_RoleAdvantages(benchmark::State& state) {
  std::vector<mae::RolloutRecord> batch;
  for (int i = 0; i < state.range(0); ++i) {
    batch.push_back(mae::RolloutRecord{mae::kAllRoles[i % 3], "p", "c", (i % 11) / 10.0, std::nullopt, 1});
  }
  for (auto _ : state) benchmark::DoNotOptimize(mae::compute_role_advantages(batch));
}
BENCHMARK(BM_RoleAdvantages)->Arg(48)->Arg(768);

void BM_ScriptedStep(benchmark::State& state) {
  auto config = mae::load_run_config(std::string(MAE_CONFIG_DIR) + "/scripted_demo.json");
  config.train.batch_size = static_cast<int>(state.range(0));
  auto backend = mae::make_backend(config.backend);
  auto training = mae::initial_state(config, *backend);
  const auto prompts = mae::make_prompt_set(config);
  int step = 0;
  for (auto _ : state) {
    auto rng = mae::Rng::for_step(config.train.rng_seed, ++step);
    benchmark::DoNotOptimize(mae::run_training_step(training, config.train, *backend, rng, {&prompts, nullptr}));
  }
}
BENCHMARK(BM_ScriptedStep)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
