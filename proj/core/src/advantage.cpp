#include "mae/advantage.hpp"

#include <cmath>
#include <stdexcept>

namespace mae {

namespace {

// Two-pass mean with a correction term; exact for constant inputs.
double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double n = static_cast<double>(xs.size());
  const double rough = sum / n;
  double correction = 0.0;
  for (double x : xs) correction += x - rough;
  return rough + correction / n;
}

}  // namespace

AdvantageResult compute_role_advantages(std::vector<RolloutRecord> records, double epsilon) {
  if (records.empty()) throw std::invalid_argument("compute_role_advantages: empty batch");
  if (!(epsilon > 0.0)) throw std::invalid_argument("compute_role_advantages: epsilon must be > 0");

  std::map<Role, std::vector<double>> rewards;
  for (const auto& r : records) {
    if (r.advantage) {
      throw std::invalid_argument("compute_role_advantages: record already normalized");
    }
    if (!std::isfinite(r.reward)) {
      throw std::invalid_argument("compute_role_advantages: non-finite reward");
    }
    rewards[r.role].push_back(r.reward);
  }

  AdvantageResult out;
  for (const auto& [role, xs] : rewards) {
    AdvantageStats s;
    s.role = role;
    s.count = xs.size();
    bool constant = true;
    for (double x : xs) constant = constant && x == xs.front();
    if (constant) {
      s.mean = xs.front();
      s.std = 0.0;
    } else {
      s.mean = mean_of(xs);
      double ss = 0.0;
      for (double x : xs) ss += (x - s.mean) * (x - s.mean);
      s.std = std::sqrt(ss / static_cast<double>(xs.size()));
    }
    out.stats.emplace(role, s);
  }

  for (auto& r : records) {
    const auto& s = out.stats.at(r.role);
    r.advantage = (r.reward - s.mean) / (s.std + epsilon);
  }
  out.records = std::move(records);
  return out;
}

}  // namespace mae
