#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mae/domain.hpp"

namespace mae {

/// Non-retryable backend failure. A training step that hits one aborts.
class BackendError : public Error {
 public:
  using Error::Error;
};

/// Transport failure that persisted through every retry. The orchestrator
/// degrades it to an empty completion.
class TransportError : public BackendError {
 public:
  TransportError(const std::string& what, int attempts)
      : BackendError(what + " (after " + std::to_string(attempts) + " attempts)"),
        attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

struct GenerationRequest {
  Role role = Role::kSolver;
  std::string prompt;
  double temperature = 1.0;
  double top_p = 1.0;
  int max_new_units = 8192;
  std::optional<std::uint64_t> rng_seed;
};

struct UpdateItem {
  Role role = Role::kSolver;
  std::string prompt;
  std::string completion;
  double advantage = 0.0;
};

struct UpdateBatch {
  std::vector<UpdateItem> items;
};

struct RoleUpdateSummary {
  std::size_t count = 0;
  double mean_advantage = 0.0;
  bool operator==(const RoleUpdateSummary&) const = default;
};

struct UpdateReport {
  std::map<Role, RoleUpdateSummary> per_role;
  bool applied = false;
};

/// Generation-and-update contract shared by all three roles.
///
/// generate() may be called concurrently. apply_update() needs exclusive
/// access; callers must not overlap it with any generate() call.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string name() const = 0;
  virtual std::string generate(const GenerationRequest& request) = 0;
  virtual UpdateReport apply_update(const UpdateBatch& batch) = 0;

  /// Trainable state for run snapshots; null when the backend has none.
  virtual json save_state() const { return nullptr; }
  virtual void load_state(const json& /*state*/) {}
};

/// Counts and mean advantage per role. Throws std::invalid_argument for an
/// empty batch or a non-finite advantage.
UpdateReport summarize_update(const UpdateBatch& batch);

void validate_request(const GenerationRequest& request);

/// Dispatches each role to its own backend. A backend serving several roles
/// receives one apply_update() call with all of its items.
class RoutedBackend : public Backend {
 public:
  RoutedBackend(std::shared_ptr<Backend> proposer, std::shared_ptr<Backend> solver,
                std::shared_ptr<Backend> judge);

  std::string name() const override;
  std::string generate(const GenerationRequest& request) override;
  UpdateReport apply_update(const UpdateBatch& batch) override;
  json save_state() const override;
  void load_state(const json& state) override;

  Backend& route(Role role) const;

 private:
  std::vector<std::shared_ptr<Backend>> distinct() const;

  std::map<Role, std::shared_ptr<Backend>> routes_;
};

}  // namespace mae
