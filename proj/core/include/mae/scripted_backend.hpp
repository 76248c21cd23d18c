#pragma once

#include <array>
#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mae/backend.hpp"

namespace mae {

/// One scripted behaviour. A rule matches when its role (if set) equals the
/// request role and its pattern (if non-empty) occurs in the prompt.
struct ScriptRule {
  enum class Failure { kNone, kTransport, kFatal };

  std::optional<Role> role;
  std::string contains;
  /// With several responses, the request seed picks one (seed mod count).
  /// "{seed}" in a response expands to the request seed.
  std::vector<std::string> responses;
  Failure failure = Failure::kNone;
};

/// Deterministic inference-only backend driven by an ordered rule list; the
/// first matching rule wins.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<ScriptRule> rules);

  /// Parses `{"rules": [{"role": "judge", "contains": "...", "responses": [...],
  /// "failure": "transport"}]}`.
  static std::unique_ptr<ScriptedBackend> from_json(const json& config);

  std::string name() const override { return "scripted"; }
  std::string generate(const GenerationRequest& request) override;
  UpdateReport apply_update(const UpdateBatch& batch) override;

  std::size_t calls(Role role) const;
  std::size_t update_calls() const { return update_calls_.load(); }

 private:
  std::vector<ScriptRule> rules_;
  std::array<std::atomic<std::size_t>, 3> calls_{};
  std::atomic<std::size_t> update_calls_{0};
};

}  // namespace mae
