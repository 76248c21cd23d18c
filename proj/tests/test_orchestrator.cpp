#include <gtest/gtest.h>

#include <map>

#include "mae/orchestrator.hpp"
#include "mae/scripted_backend.hpp"

using namespace mae;

namespace {

json judge_rules() {
  return json::array({
      {{"role", "judge"}, {"contains", "Generated Solution:"}, {"response", "<think>ok</think><score>6</score>"}},
      {{"role", "judge"}, {"contains", "Question: alpha"}, {"response", "<score>6</score>"}},
      {{"role", "judge"}, {"contains", "Question: beta"}, {"response", "<score>7</score>"}},
      {{"role", "judge"}, {"response", "<score>8</score>"}},
  });
}

std::unique_ptr<ScriptedBackend> backend_with(json proposer_rule) {
  json rules = json::array({proposer_rule, {{"role", "solver"}, {"response", "<answer>42</answer>"}}});
  for (const auto& r : judge_rules()) rules.push_back(r);
  return ScriptedBackend::from_json(json{{"rules", rules}});
}

std::unique_ptr<ScriptedBackend> alpha_beta_gamma() {
  return backend_with({{"role", "proposer"},
                       {"responses", {"<question>alpha</question>", "<question>beta</question>",
                                      "<question>gamma</question>"}}});
}

TrainingState seed_state(std::size_t n = 3) {
  std::vector<SeedRecord> seeds;
  for (std::size_t i = 0; i < n; ++i) seeds.push_back({"seed " + std::to_string(i), "test"});
  return TrainingState{ingest_seed(seeds), PairPool{}, 0};
}

TrainConfig small_config(int batch = 4) {
  TrainConfig c;
  c.batch_size = batch;
  c.total_steps = 10;
  c.rng_seed = 5;
  return c;
}

}  // namespace

TEST(GenerationMode, ExtremesAreDeterministic) {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(choose_generation_mode(0.0, rng), GenerationMode::kFromScratch);
    EXPECT_EQ(choose_generation_mode(1.0, rng), GenerationMode::kWithReference);
  }
  EXPECT_THROW(choose_generation_mode(1.5, rng), std::invalid_argument);
}

TEST(TrainingStep, EventTraceFollowsPhaseOrder) {
  auto backend = alpha_beta_gamma();
  auto state = seed_state();
  const auto config = small_config(4);
  EventTrace trace;
  Rng rng(3);
  run_training_step(state, config, *backend, rng, {nullptr, &trace});
  using E = StepEvent;
  const std::vector<std::pair<E, std::size_t>> expected = {
      {E::kPropose, 4},    {E::kJudgeQuality, 4}, {E::kSolveSample, 20}, {E::kAdmit, 4},
      {E::kSolvePhase, 4}, {E::kJudgeAnswers, 4}, {E::kJudgePhase, 4},   {E::kAdvantage, 1},
      {E::kUpdate, 1}};
  EXPECT_EQ(trace.run_lengths(), expected);
  EXPECT_EQ(backend->update_calls(), 1u);
}

TEST(TrainingStep, QualityFilterAdmitsAtOrAboveThreshold) {
  auto backend = alpha_beta_gamma();
  auto state = seed_state();
  const auto config = small_config(6);
  Rng rng(11);
  for (int i = 0; i < 5; ++i) run_training_step(state, config, *backend, rng);
  EXPECT_FALSE(state.questions.contains(question_id_for("alpha")));
  EXPECT_TRUE(state.questions.contains(question_id_for("beta")));
  EXPECT_TRUE(state.questions.contains(question_id_for("gamma")));
  EXPECT_DOUBLE_EQ(*state.questions.find(question_id_for("beta"))->quality_score, 0.7);
  std::map<std::string, int> admitted, attempts;
  for (const auto& e : state.questions.admission_log()) {
    ++attempts[e.question_id];
    admitted[e.question_id] += e.admitted ? 1 : 0;
  }
  EXPECT_GT(attempts[question_id_for("alpha")], 0);
  EXPECT_EQ(admitted[question_id_for("alpha")], 0);
  EXPECT_EQ(admitted[question_id_for("beta")], 1);
  EXPECT_EQ(admitted[question_id_for("gamma")], 1);
}

TEST(TrainingStep, ProposerRewardArithmetic) {
  auto backend = backend_with({{"role", "proposer"}, {"response", "<question>gamma</question>"}});
  auto state = seed_state();
  auto config = small_config(2);
  Rng rng(2);
  const auto out = run_training_step(state, config, *backend, rng);
  // quality 0.8, solve samples judged 6 -> difficulty 0.4, exact format.
  EXPECT_NEAR(out.report.mean_quality, 0.8, 1e-15);
  EXPECT_NEAR(out.report.mean_difficulty, 0.4, 1e-15);
  EXPECT_NEAR(out.report.mean_proposer_reward, (0.8 + 0.4 + 1.0) / 3.0, 1e-12);
  // Solver: judge 0.6, exact format.
  EXPECT_NEAR(out.report.mean_solver_reward, 0.8, 1e-12);
  EXPECT_NEAR(out.report.mean_solver_judge, 0.6, 1e-12);
  EXPECT_EQ(out.report.judge_format_rate, 1.0);
  EXPECT_EQ(out.report.proposed, 2);
  EXPECT_EQ(out.report.admitted, 1);  // the second proposal is a duplicate
  EXPECT_EQ(out.report.pool_size, 4u);
  EXPECT_EQ(out.report.pair_pool_size, 2u);

  std::size_t per_role[3] = {0, 0, 0};
  for (const auto& r : out.rollouts) {
    ++per_role[static_cast<int>(r.role)];
    ASSERT_TRUE(r.advantage.has_value());
    EXPECT_EQ(r.step, 1);
  }
  EXPECT_EQ(per_role[0], 2u);
  EXPECT_EQ(per_role[1], 2u);
  EXPECT_EQ(per_role[2], 2u);
}

TEST(TrainingStep, UntaggedProposalGetsNeutralQualityAndNoAdmission) {
  auto backend = backend_with({{"role", "proposer"}, {"response", "I refuse."}});
  auto state = seed_state();
  Rng rng(2);
  EventTrace trace;
  const auto out = run_training_step(state, small_config(2), *backend, rng, {nullptr, &trace});
  EXPECT_EQ(out.report.admitted, 0);
  EXPECT_EQ(out.report.mean_quality, 0.5);
  EXPECT_EQ(out.report.mean_difficulty, 0.0);
  EXPECT_NEAR(out.report.mean_proposer_reward, 0.5 / 3.0, 1e-12);
  EXPECT_EQ(backend->calls(Role::kProposer), 2u);
  EXPECT_EQ(state.questions.size(), 3u);
  for (const auto& [e, n] : trace.run_lengths()) {
    EXPECT_NE(e, StepEvent::kAdmit);
    EXPECT_NE(e, StepEvent::kSolveSample);
  }
}

TEST(TrainingStep, ReferenceModeRecordsParent) {
  auto backend = alpha_beta_gamma();
  auto state = seed_state();
  auto config = small_config(6);
  config.reference_probability = 1.0;
  Rng rng(4);
  run_training_step(state, config, *backend, rng);
  for (const auto& q : state.questions.questions()) {
    if (is_seed(q.origin)) continue;
    const auto* ref = std::get_if<ReferenceOrigin>(&q.origin);
    ASSERT_NE(ref, nullptr);
    EXPECT_TRUE(state.questions.contains(ref->parent_id));
    EXPECT_EQ(ref->step, 1);
  }
  config.reference_probability = 0.0;
  auto scratch_state = seed_state();
  run_training_step(scratch_state, config, *backend, rng);
  for (const auto& q : scratch_state.questions.questions()) {
    if (!is_seed(q.origin)) {
      EXPECT_TRUE(std::holds_alternative<ScratchOrigin>(q.origin));
    }
  }
}

TEST(TrainingStep, FatalBackendErrorAbortsWithoutChanges) {
  auto backend = ScriptedBackend::from_json(json{{"rules", json::array({
      {{"role", "proposer"}, {"response", "<question>gamma</question>"}},
      {{"role", "solver"}, {"failure", "fatal"}},
      {{"role", "judge"}, {"response", "<score>8</score>"}},
  })}});
  auto state = seed_state();
  const auto before = state.questions;
  Rng rng(7);
  const auto out = run_training_step(state, small_config(2), *backend, rng);
  EXPECT_TRUE(out.report.aborted);
  EXPECT_FALSE(out.report.abort_reason.empty());
  EXPECT_TRUE(out.rollouts.empty());
  EXPECT_EQ(backend->update_calls(), 0u);
  EXPECT_EQ(state.questions, before);
  EXPECT_TRUE(state.pairs.empty());
  EXPECT_EQ(state.completed_steps, 1);
}

TEST(TrainingStep, TransportFailuresDegrade) {
  auto backend = ScriptedBackend::from_json(json{{"rules", json::array({
      {{"role", "proposer"}, {"response", "<question>gamma</question>"}},
      {{"role", "solver"}, {"failure", "transport"}},
      {{"role", "judge"}, {"response", "<score>8</score>"}},
  })}});
  auto state = seed_state();
  Rng rng(7);
  const auto out = run_training_step(state, small_config(2), *backend, rng);
  EXPECT_FALSE(out.report.aborted);
  // 2 proposals x 5 samples + 2 Solver-phase answers
  EXPECT_EQ(out.report.degraded_generations, 12);
  EXPECT_EQ(state.pairs.size(), 2u);
  EXPECT_EQ(state.pairs.pairs()[0].answer.raw_output, "");
  // Empty answers: Judge 0.8, format 0 -> 0.4
  EXPECT_NEAR(out.report.mean_solver_reward, 0.4, 1e-12);
}

TEST(TrainingStep, EmptyPoolIsAnError) {
  auto backend = alpha_beta_gamma();
  TrainingState state{ingest_seed({}, true), PairPool{}, 0};
  Rng rng(1);
  EXPECT_THROW(run_training_step(state, small_config(), *backend, rng), PoolError);
}

TEST(TrainingStep, ParallelismDoesNotChangeResults) {
  std::vector<StepReport> serial, parallel;
  for (int par : {1, 4}) {
    auto backend = backend_with({{"role", "proposer"}, {"response", "<question>q {seed}</question>"}});
    auto state = seed_state();
    auto config = small_config(8);
    config.parallelism = par;
    for (int step = 1; step <= 3; ++step) {
      auto rng = Rng::for_step(config.rng_seed, step);
      (par == 1 ? serial : parallel).push_back(run_training_step(state, config, *backend, rng).report);
    }
  }
  EXPECT_EQ(serial, parallel);
}

TEST(TrainingStep, StepReportJsonRoundTrip) {
  auto backend = alpha_beta_gamma();
  auto state = seed_state();
  Rng rng(3);
  const auto report = run_training_step(state, small_config(), *backend, rng).report;
  EXPECT_EQ(json(report).get<StepReport>(), report);
}

TEST(Bootstrap, ProducesDistinctSelfGeneratedSeeds) {
  auto backend = backend_with({{"role", "proposer"}, {"response", "<question>seed question {seed}</question>"}});
  Rng rng(5);
  const auto seeds = bootstrap_seed_questions(*backend, TrainConfig{}, 16, rng);
  ASSERT_EQ(seeds.size(), 16u);
  EXPECT_EQ(ingest_seed(seeds).size(), 16u);
  for (const auto& s : seeds) EXPECT_EQ(s.source, "self-generated");
}

TEST(Bootstrap, GivesUpOnRepeats) {
  auto backend = backend_with({{"role", "proposer"}, {"response", "<question>same</question>"}});
  Rng rng(5);
  const auto seeds = bootstrap_seed_questions(*backend, TrainConfig{}, 4, rng);
  EXPECT_EQ(seeds.size(), 1u);
  EXPECT_EQ(backend->calls(Role::kProposer), 16u);
}
