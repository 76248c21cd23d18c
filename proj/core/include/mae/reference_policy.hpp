#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mae/backend.hpp"

namespace mae {

/// Softmax policy over a fixed action vocabulary for one role.
struct ActionTable {
  std::vector<std::string> actions;
  std::vector<double> logits;
  /// Completion text; "{action}" is replaced by the sampled action.
  std::string render_template = "{action}";

  std::size_t index_of(std::string_view action) const;
  std::string render(std::size_t action) const;
};

/// Parameters of the reference policy: one logit table per role.
struct ReferencePolicyParams {
  std::map<Role, ActionTable> tables;
  double learning_rate = 0.1;
  /// Weight of an entropy-ascent term added to each update; 0 disables it.
  double entropy_coefficient = 0.0;

  void validate() const;
};

std::vector<double> softmax(std::span<const double> logits);

struct LogProbGrad {
  double logprob = 0.0;
  /// d logprob / d logits of the role's table.
  std::vector<double> grad;
};

/// Exact log pi(action) and its gradient (one-hot(action) - pi). Throws
/// std::invalid_argument for an unknown role or action.
LogProbGrad reference_logprob_and_grad(const ReferencePolicyParams& params, Role role,
                                       std::string_view action);

/// Per-role contextual bandit: ignores the prompt, samples an action from its
/// softmax, and renders it. apply_update() does one REINFORCE ascent step
///   logits += lr * sum_i advantage_i * grad log pi(action_i)
/// computed at the pre-update parameters. The gradient is that of the
/// untempered policy, so updates are exact at temperature 1 and top_p 1.
class ReferencePolicyBackend : public Backend {
 public:
  explicit ReferencePolicyBackend(ReferencePolicyParams params);

  /// `{"learning_rate": .., "entropy_coefficient": .., "roles": {"solver":
  /// {"actions": [...], "logits": [...], "template": "..."}}}`. Missing logits
  /// start at zero.
  static std::unique_ptr<ReferencePolicyBackend> from_json(const json& config);

  std::string name() const override { return "reference"; }
  std::string generate(const GenerationRequest& request) override;
  UpdateReport apply_update(const UpdateBatch& batch) override;
  json save_state() const override;
  void load_state(const json& state) override;

  ReferencePolicyParams params() const;
  std::vector<double> probabilities(Role role) const;
  /// Sum over actions of pi(action) * value(action).
  double expected_value(Role role, std::span<const double> action_values) const;
  std::size_t skipped_items() const { return skipped_; }

 private:
  mutable std::mutex mutex_;
  ReferencePolicyParams params_;
  std::size_t skipped_ = 0;
};

}  // namespace mae
