#include "mae/reward.hpp"

#include <spdlog/spdlog.h>

namespace mae {

namespace {

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
  }
}

}  // namespace

SolveScore mean_solve_score(std::span<const JudgeVerdict> verdicts, std::size_t expected_n) {
  if (verdicts.empty()) {
    throw Error("mean_solve_score: no verdicts (difficulty sampling produced nothing)");
  }
  double sum = 0.0;
  for (const auto& v : verdicts) {
    if (v.target != VerdictTarget::kAnswer) {
      throw std::invalid_argument("mean_solve_score: verdict does not target an answer");
    }
    sum += v.normalized;
  }
  SolveScore out;
  out.used = verdicts.size();
  out.mean = sum / static_cast<double>(verdicts.size());
  out.count_mismatch = verdicts.size() != expected_n;
  if (out.count_mismatch) {
    spdlog::warn("mean_solve_score: expected {} verdicts, got {}", expected_n, verdicts.size());
  }
  return out;
}

double difficulty_reward(double mean_solve) {
  require_unit(mean_solve, "mean solve score");
  return 1.0 - mean_solve;
}

RewardBreakdown proposer_total(double quality, double difficulty, FormatLevel format,
                               const RewardWeights& weights) {
  require_unit(quality, "quality");
  require_unit(difficulty, "difficulty");
  const double f = format_value(format);
  const auto& w = weights.proposer;
  RewardBreakdown b;
  b.role = Role::kProposer;
  b.components = {{"quality", quality}, {"difficulty", difficulty}, {"format", f}};
  b.total = w.quality * quality + w.difficulty * difficulty + w.format * f;
  return b;
}

RewardBreakdown solver_total(double judge, FormatLevel format, const RewardWeights& weights) {
  require_unit(judge, "judge score");
  const double f = format_value(format);
  const auto& w = weights.solver;
  RewardBreakdown b;
  b.role = Role::kSolver;
  b.components = {{"judge", judge}, {"format", f}};
  b.total = w.judge * judge + w.format * f;
  return b;
}

RewardBreakdown judge_total(FormatLevel format) {
  RewardBreakdown b;
  b.role = Role::kJudge;
  b.components = {{"format", format_value(format)}};
  b.total = format_value(format);
  return b;
}

}  // namespace mae
