#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mae/advantage.hpp"

using namespace mae;

namespace {

std::vector<RolloutRecord> batch(const std::vector<std::pair<Role, double>>& rewards) {
  std::vector<RolloutRecord> out;
  for (const auto& [role, r] : rewards) out.push_back(RolloutRecord{role, "p", "c", r, std::nullopt, 1});
  return out;
}

}  // namespace

TEST(Advantage, HandComputedExample) {
  // Solver rewards 1, 2, 3: mean 2, population std sqrt(2/3).
  const auto res = compute_role_advantages(
      batch({{Role::kSolver, 1.0}, {Role::kSolver, 2.0}, {Role::kSolver, 3.0}}));
  const double sd = std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(*res.records[0].advantage, -1.0 / (sd + 1e-8), 1e-12);
  EXPECT_NEAR(*res.records[1].advantage, 0.0, 1e-15);
  EXPECT_NEAR(*res.records[2].advantage, 1.0 / (sd + 1e-8), 1e-12);
  const auto& s = res.stats.at(Role::kSolver);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_NEAR(s.std, sd, 1e-15);
  EXPECT_EQ(s.count, 3u);
  EXPECT_FALSE(res.stats.contains(Role::kJudge));
}

TEST(Advantage, ConstantRoleGivesExactZeros) {
  const auto res = compute_role_advantages(
      batch({{Role::kJudge, 0.1}, {Role::kJudge, 0.1}, {Role::kJudge, 0.1}, {Role::kSolver, 0.2}}));
  for (const auto& r : res.records) EXPECT_EQ(*r.advantage, 0.0);
  EXPECT_EQ(res.stats.at(Role::kJudge).std, 0.0);
  EXPECT_EQ(res.stats.at(Role::kSolver).count, 1u);
}

TEST(Advantage, PreservesOrderAndFields) {
  auto in = batch({{Role::kJudge, 1.0}, {Role::kSolver, 0.0}, {Role::kJudge, 0.0}});
  in[1].prompt = "solver prompt";
  const auto res = compute_role_advantages(in);
  ASSERT_EQ(res.records.size(), 3u);
  EXPECT_EQ(res.records[1].prompt, "solver prompt");
  EXPECT_EQ(res.records[0].role, Role::kJudge);
  EXPECT_GT(*res.records[0].advantage, 0.0);
  EXPECT_LT(*res.records[2].advantage, 0.0);
}

TEST(Advantage, NormalizedMoments) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<Role, double>> rewards;
    for (int i = 0; i < 40; ++i) rewards.emplace_back(kAllRoles[gen() % 3], u(gen));
    const auto res = compute_role_advantages(batch(rewards));
    for (auto role : kAllRoles) {
      double sum = 0.0, sq = 0.0;
      std::size_t n = 0;
      for (const auto& r : res.records) {
        if (r.role != role) continue;
        sum += *r.advantage;
        sq += *r.advantage * *r.advantage;
        ++n;
      }
      if (n < 2) continue;
      EXPECT_LE(std::abs(sum / n), 1e-9);
      EXPECT_NEAR(std::sqrt(sq / n - (sum / n) * (sum / n)), 1.0, 1e-6);
    }
  }
}

TEST(Advantage, RolesAreIsolated) {
  auto in = batch({{Role::kSolver, 0.2}, {Role::kSolver, 0.9}, {Role::kJudge, 0.0}, {Role::kJudge, 1.0},
                   {Role::kProposer, 0.3}, {Role::kProposer, 0.6}});
  const auto before = compute_role_advantages(in);
  in[2].reward = 0.5;  // perturb one Judge reward
  in[3].reward = 0.75;
  const auto after = compute_role_advantages(in);
  for (std::size_t i : {0u, 1u, 4u, 5u}) EXPECT_EQ(*before.records[i].advantage, *after.records[i].advantage);
  EXPECT_NE(before.stats.at(Role::kJudge), after.stats.at(Role::kJudge));
}

TEST(Advantage, Errors) {
  EXPECT_THROW(compute_role_advantages({}), std::invalid_argument);
  EXPECT_THROW(compute_role_advantages(batch({{Role::kSolver, 1.0}}), 0.0), std::invalid_argument);
  EXPECT_THROW(compute_role_advantages(batch({{Role::kSolver, INFINITY}})), std::invalid_argument);
  auto preset = batch({{Role::kSolver, 1.0}});
  preset[0].advantage = 0.3;
  EXPECT_THROW(compute_role_advantages(preset), std::invalid_argument);
}
