#include "mae/config.hpp"

#include <cstdlib>
#include <fstream>

namespace mae {

json default_trainer_settings() {
  return json{{"max_prompt_length", 8192},
              {"max_response_length", 8192},
              {"train_batch_size", 128},
              {"learning_rate", 1e-6},
              {"optimizer", "AdamW"},
              {"grad_clip", 1.0},
              {"training_steps", 300},
              {"algorithm", "Task-Relative REINFORCE++"},
              {"kl_loss", false},
              {"kl_reward", false},
              {"ppo_epochs", 1},
              {"entropy_coefficient", 0.001},
              {"rollout_temperature", 1.0},
              {"rollout_top_p", 1.0},
              {"n_rollout", 1},
              {"n_reference_problem", 1},
              {"n_difficulty_samples", 5}};
}

RunConfig run_config_from_json(const json& document, const std::filesystem::path& base_dir) {
  RunConfig c;
  try {
    c.train = document.get<TrainConfig>();
    c.train.validate();
    c.seed_file = document.value("seed_file", std::string{});
    if (!c.seed_file.empty() && !base_dir.empty() && std::filesystem::path(c.seed_file).is_relative()) {
      c.seed_file = (base_dir / c.seed_file).lexically_normal().string();
    }
    c.zero_setting = document.value("zero_setting", false);
    c.zero_seed_count = document.value("zero_seed_count", c.zero_seed_count);
    c.snapshot_every = document.value("snapshot_every", c.snapshot_every);
    c.output_dir = document.value("output_dir", c.output_dir);
    c.backend = document.value("backend", default_backend_config("scripted"));
    c.trainer = default_trainer_settings();
    if (document.contains("trainer")) c.trainer.update(document.at("trainer"));
    c.grader = document.value("grader", json::object());
    c.prompts = document.value("prompts", json::object());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  if (c.snapshot_every < 1) throw ConfigError("invalid config: snapshot_every must be >= 1");
  if (c.seed_file.empty() && !c.zero_setting) {
    throw ConfigError("invalid config: seed_file is required unless zero_setting is true");
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(document, path.parent_path());
}

namespace {

bool is_reference(const std::string& value) {
  return value.size() > 3 && value.rfind("${", 0) == 0 && value.back() == '}';
}

void redact(json& j) {
  if (j.is_object()) {
    for (auto& [key, value] : j.items()) {
      if (key == "api_key" && value.is_string() && !is_reference(value.get<std::string>())) {
        value = "<redacted>";
      } else {
        redact(value);
      }
    }
  } else if (j.is_array()) {
    for (auto& v : j) redact(v);
  }
}

}  // namespace

json to_manifest_json(const RunConfig& c) {
  json j = c.train;
  j["seed_file"] = c.seed_file;
  j["zero_setting"] = c.zero_setting;
  j["zero_seed_count"] = c.zero_seed_count;
  j["snapshot_every"] = c.snapshot_every;
  j["output_dir"] = c.output_dir;
  j["backend"] = c.backend;
  j["trainer"] = c.trainer;
  j["grader"] = c.grader;
  j["prompts"] = c.prompts;
  redact(j);
  return j;
}

std::string config_hash(const RunConfig& config) {
  json j = to_manifest_json(config);
  j.erase("parallelism");
  j.erase("snapshot_every");
  j.erase("output_dir");
  return hex64(fnv1a64(j.dump()));
}

std::string expand_secret(const std::string& value) {
  if (!is_reference(value)) return value;
  const auto name = value.substr(2, value.size() - 3);
  const char* v = std::getenv(name.c_str());
  if (!v) throw ConfigError("environment variable " + name + " is not set");
  return v;
}

PromptSet make_prompt_set(const RunConfig& config) {
  PromptSet set;
  for (const auto& [name, body] : config.prompts.items()) {
    try {
      set.set(prompt_variant_from_string(name), body.get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("invalid prompt override: ") + e.what());
    }
  }
  return set;
}

}  // namespace mae
