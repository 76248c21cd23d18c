#pragma once

#include <cstddef>
#include <span>

#include "mae/domain.hpp"

namespace mae {

struct SolveScore {
  double mean = 0.0;
  std::size_t used = 0;
  /// Set when the number of verdicts differs from the number requested.
  bool count_mismatch = false;
};

/// Mean normalized Judge score over the Solver's sampled answers. Averages
/// over the verdicts actually present; throws mae::Error on an empty list and
/// std::invalid_argument if any verdict targets a question.
SolveScore mean_solve_score(std::span<const JudgeVerdict> verdicts, std::size_t expected_n);

/// 1 - mean solve score.
double difficulty_reward(double mean_solve);

RewardBreakdown proposer_total(double quality, double difficulty, FormatLevel format,
                               const RewardWeights& weights);
RewardBreakdown solver_total(double judge, FormatLevel format, const RewardWeights& weights);
/// The Judge is rewarded for its own output format only.
RewardBreakdown judge_total(FormatLevel format);

}  // namespace mae
