#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

#include "mae/backend.hpp"
#include "mae/domain.hpp"
#include "mae/prompts.hpp"

namespace mae {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Everything a training run is configured with. The JSON document mirrors
/// these names; TrainConfig fields sit at the top level.
struct RunConfig {
  TrainConfig train;
  /// Seed questions, resolved against the config file's directory.
  std::string seed_file;
  /// Bootstrap `zero_seed_count` self-generated seeds instead of reading a
  /// seed file.
  bool zero_setting = false;
  std::size_t zero_seed_count = 16;
  int snapshot_every = 10;
  std::string output_dir = "runs/latest";
  /// Backend section: {"kind": "http" | "scripted" | "reference" | "routed", ...}.
  json backend;
  /// Settings passed through to an external trainer (optimizer, clipping,
  /// KL, PPO epochs). The built-in reference policy ignores them.
  json trainer;
  /// Evaluation grader section.
  json grader;
  /// Optional prompt body overrides keyed by variant name.
  json prompts = json::object();
};

/// Training hyperparameters recorded for external trainers.
json default_trainer_settings();

RunConfig run_config_from_json(const json& document, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Resolved configuration as written to a run manifest. Literal API keys are
/// redacted; "${VAR}" references are kept as written.
json to_manifest_json(const RunConfig& config);

/// Hash over the manifest form, ignoring keys that do not affect results
/// (parallelism, snapshot_every, output_dir).
std::string config_hash(const RunConfig& config);

/// Expands a "${NAME}" value from the environment; other strings pass
/// through. Throws ConfigError when the variable is unset. Only applied to
/// api_key fields.
std::string expand_secret(const std::string& value);

/// Built-in section for --backend overrides without a matching section.
json default_backend_config(const std::string& kind);

/// Instantiates the backend described by a backend section. HTTP api keys
/// come from "api_key" (after expansion) or the variable named by
/// "api_key_env" (default OPENAI_API_KEY).
std::shared_ptr<Backend> make_backend(const json& section);

PromptSet make_prompt_set(const RunConfig& config);

}  // namespace mae
