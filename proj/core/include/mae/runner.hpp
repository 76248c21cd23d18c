#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mae/config.hpp"
#include "mae/orchestrator.hpp"

namespace mae {

/// Resume refused because the stored run was produced by another config.
class ConfigMismatchError : public ConfigError {
 public:
  ConfigMismatchError(const std::string& what, std::vector<std::string> differences)
      : ConfigError(what), differences_(std::move(differences)) {}
  const std::vector<std::string>& differences() const { return differences_; }

 private:
  std::vector<std::string> differences_;
};

struct RunOptions {
  std::filesystem::path output_dir;
  bool resume = false;
  /// Stop after this step even if total_steps is larger (a controlled
  /// interruption). A final snapshot is not forced.
  std::optional<int> stop_after_step;
  std::function<void(const StepReport&)> on_step;
};

struct RunResult {
  /// Reports of the steps executed by this invocation.
  std::vector<StepReport> reports;
  int completed_steps = 0;
  bool finished = false;
};

/// Run directory layout:
///   manifest.jsonl   run header (resolved config, hash, seed), then one line
///                    per snapshot, resume and completion
///   steps.jsonl      one StepReport per step
///   rollouts.jsonl   every rollout with reward and advantage
///   snapshots/step-NNNNNN/{questions,pairs}.jsonl, backend.json
///
/// Step t draws all randomness from Rng::for_step(rng_seed, t), so a run
/// resumed from a snapshot replays the uninterrupted transcript. Snapshots
/// are taken at step 0, every snapshot_every steps, and at the last step.
RunResult run_training(const RunConfig& config, Backend& backend, TrainingState initial,
                       const RunOptions& options);

/// Seed pool for a fresh run: the seed file, or zero-setting bootstrap.
TrainingState initial_state(const RunConfig& config, Backend& backend);

/// Reads StepReports from the steps.jsonl next to a manifest, keeping steps
/// in [first, last]. No backend is involved.
std::vector<StepReport> replay_reports(const std::filesystem::path& manifest_path, int first, int last);

/// One-line human summary of a report.
std::string summarize(const StepReport& report);

/// Keys whose values differ between two JSON documents, as "path: a -> b".
std::vector<std::string> json_differences(const json& a, const json& b);

}  // namespace mae
