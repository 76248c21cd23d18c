#include <gtest/gtest.h>

#include <random>

#include "mae/reward.hpp"
#include "mae/structured_output.hpp"

using namespace mae;

namespace {

JudgeVerdict answer_verdict(int score) {
  return make_verdict(VerdictTarget::kAnswer, "<score>" + std::to_string(score) + "</score>", 0.5);
}

}  // namespace

TEST(MeanSolveScore, AveragesNormalizedScores) {
  std::vector<JudgeVerdict> v = {answer_verdict(2), answer_verdict(4), answer_verdict(9),
                                 answer_verdict(10), answer_verdict(5)};
  const auto s = mean_solve_score(v, 5);
  EXPECT_NEAR(s.mean, 0.6, 1e-15);
  EXPECT_EQ(s.used, 5u);
  EXPECT_FALSE(s.count_mismatch);
  EXPECT_NEAR(difficulty_reward(s.mean), 0.4, 1e-15);
}

TEST(MeanSolveScore, ParseFailuresCountAsNeutral) {
  std::vector<JudgeVerdict> v = {answer_verdict(10), make_verdict(VerdictTarget::kAnswer, "??", 0.5)};
  EXPECT_DOUBLE_EQ(mean_solve_score(v, 2).mean, 0.75);
}

TEST(MeanSolveScore, MismatchIsFlaggedNotFatal) {
  std::vector<JudgeVerdict> v = {answer_verdict(8), answer_verdict(6), answer_verdict(4)};
  const auto s = mean_solve_score(v, 5);
  EXPECT_TRUE(s.count_mismatch);
  EXPECT_EQ(s.used, 3u);
  EXPECT_DOUBLE_EQ(s.mean, 0.6);
}

TEST(MeanSolveScore, Errors) {
  EXPECT_THROW(mean_solve_score({}, 5), Error);
  std::vector<JudgeVerdict> v = {make_verdict(VerdictTarget::kQuestion, "<score>8</score>", 0.5)};
  EXPECT_THROW(mean_solve_score(v, 1), std::invalid_argument);
}

TEST(ProposerTotal, EqualWeightsHandExample) {
  // (0.8 + 0.4 + 1.0) / 3
  const auto b = proposer_total(0.8, 0.4, FormatLevel::kExact, RewardWeights{});
  EXPECT_NEAR(b.total, 2.2 / 3.0, 1e-15);
  EXPECT_EQ(b.role, Role::kProposer);
  EXPECT_EQ(b.components.at("quality"), 0.8);
  EXPECT_EQ(b.components.at("difficulty"), 0.4);
  EXPECT_EQ(b.components.at("format"), 1.0);
}

TEST(SolverTotal, HandExample) {
  const auto b = solver_total(0.7, FormatLevel::kMultiple, RewardWeights{});
  EXPECT_NEAR(b.total, 0.6, 1e-15);
  EXPECT_EQ(b.components.size(), 2u);
}

TEST(JudgeTotal, FormatOnly) {
  EXPECT_EQ(judge_total(FormatLevel::kExact).total, 1.0);
  EXPECT_EQ(judge_total(FormatLevel::kMultiple).total, 0.5);
  EXPECT_EQ(judge_total(FormatLevel::kNone).total, 0.0);
  EXPECT_EQ(judge_total(FormatLevel::kNone).role, Role::kJudge);
}

TEST(Rewards, RejectOutOfRangeInputs) {
  EXPECT_THROW(proposer_total(1.1, 0.0, FormatLevel::kNone, {}), std::invalid_argument);
  EXPECT_THROW(proposer_total(0.5, -0.1, FormatLevel::kNone, {}), std::invalid_argument);
  EXPECT_THROW(solver_total(std::nan(""), FormatLevel::kNone, {}), std::invalid_argument);
  EXPECT_THROW(difficulty_reward(1.5), std::invalid_argument);
}

TEST(Rewards, CustomWeights) {
  RewardWeights w;
  w.proposer = {0.5, 0.25, 0.25};
  w.solver = {0.9, 0.1};
  EXPECT_NEAR(proposer_total(1.0, 0.0, FormatLevel::kNone, w).total, 0.5, 1e-15);
  EXPECT_NEAR(solver_total(1.0, FormatLevel::kNone, w).total, 0.9, 1e-15);
}

TEST(Rewards, RandomTuplesMatchWeightedSum) {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const FormatLevel levels[] = {FormatLevel::kNone, FormatLevel::kMultiple, FormatLevel::kExact};
  const double values[] = {0.0, 0.5, 1.0};
  for (int i = 0; i < 1000; ++i) {
    const double q = u(gen), d = u(gen), j = u(gen);
    const int f = static_cast<int>(gen() % 3);
    EXPECT_NEAR(proposer_total(q, d, levels[f], {}).total, (q + d + values[f]) / 3.0, 1e-12);
    EXPECT_NEAR(solver_total(j, levels[f], {}).total, 0.5 * j + 0.5 * values[f], 1e-12);
  }
}
