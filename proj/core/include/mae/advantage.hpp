#pragma once

#include <map>
#include <vector>

#include "mae/domain.hpp"

namespace mae {

inline constexpr double kDefaultAdvantageEpsilon = 1e-8;

struct AdvantageResult {
  std::vector<RolloutRecord> records;
  std::map<Role, AdvantageStats> stats;
};

/// Task-relative normalization: each record's advantage is
/// (r - mean_role) / (std_role + epsilon), with the mean and population
/// standard deviation taken over the records of the same role only. Roles
/// absent from the batch get no stats entry.
///
/// Throws std::invalid_argument on an empty batch, a non-positive epsilon, a
/// non-finite reward, or a record that already carries an advantage.
AdvantageResult compute_role_advantages(std::vector<RolloutRecord> records,
                                        double epsilon = kDefaultAdvantageEpsilon);

}  // namespace mae
