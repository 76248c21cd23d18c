#include "mae/runner.hpp"

#include <cstdio>
#include <sstream>

#include <spdlog/spdlog.h>

#include "mae/jsonl.hpp"

namespace mae {

namespace fs = std::filesystem;

namespace {

std::string snapshot_dir_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step-%06d", step);
  return std::string("snapshots/") + buf;
}

void flatten(const json& j, const std::string& prefix, std::map<std::string, json>& out) {
  if (j.is_object() && !j.empty()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else {
    out[prefix] = j;
  }
}

void write_snapshot(const fs::path& run_dir, const TrainingState& state, const Backend& backend) {
  const auto rel = snapshot_dir_name(state.completed_steps);
  const auto dir = run_dir / rel;
  fs::create_directories(dir);
  state.questions.snapshot(dir / "questions.jsonl");
  state.pairs.snapshot(dir / "pairs.jsonl");
  write_jsonl(dir / "backend.jsonl", {json{{"step", state.completed_steps}, {"state", backend.save_state()}}});
  append_jsonl(run_dir / "manifest.jsonl",
               json{{"type", "snapshot"},
                    {"step", state.completed_steps},
                    {"dir", rel},
                    {"questions_hash", state.questions.content_hash()},
                    {"pairs_hash", state.pairs.content_hash()}});
}

TrainingState restore_snapshot(const fs::path& run_dir, const json& entry, Backend& backend) {
  const auto dir = run_dir / entry.at("dir").get<std::string>();
  TrainingState state;
  state.questions = QuestionPool::restore(dir / "questions.jsonl");
  state.pairs = PairPool::restore(dir / "pairs.jsonl");
  state.completed_steps = entry.at("step").get<int>();
  if (state.questions.content_hash() != entry.at("questions_hash").get<std::string>() ||
      state.pairs.content_hash() != entry.at("pairs_hash").get<std::string>()) {
    throw Error("snapshot " + dir.string() + " does not match its manifest hashes");
  }
  read_jsonl(dir / "backend.jsonl", [&](const json& r, std::size_t) {
    if (!r.at("state").is_null()) backend.load_state(r.at("state"));
  });
  return state;
}

}  // namespace

std::vector<std::string> json_differences(const json& a, const json& b) {
  std::map<std::string, json> fa, fb;
  flatten(a, "", fa);
  flatten(b, "", fb);
  std::vector<std::string> out;
  for (const auto& [k, v] : fa) {
    auto it = fb.find(k);
    if (it == fb.end()) {
      out.push_back(k + ": " + v.dump() + " -> (absent)");
    } else if (it->second != v) {
      out.push_back(k + ": " + v.dump() + " -> " + it->second.dump());
    }
  }
  for (const auto& [k, v] : fb) {
    if (!fa.contains(k)) out.push_back(k + ": (absent) -> " + v.dump());
  }
  return out;
}

std::string summarize(const StepReport& r) {
  std::ostringstream ss;
  ss.precision(4);
  ss << "step " << r.step;
  if (r.aborted) {
    ss << " ABORTED: " << r.abort_reason;
    return ss.str();
  }
  ss << " proposed=" << r.proposed << " admitted=" << r.admitted << " pool=" << r.pool_size
     << " pairs=" << r.pair_pool_size << " R_P=" << r.mean_proposer_reward << " R_S=" << r.mean_solver_reward
     << " difficulty=" << r.mean_difficulty << " judge_format=" << r.judge_format_rate;
  if (r.degraded_generations > 0) ss << " degraded=" << r.degraded_generations;
  return ss.str();
}

TrainingState initial_state(const RunConfig& config, Backend& backend) {
  TrainingState state;
  if (config.zero_setting && config.seed_file.empty()) {
    Rng rng = Rng::for_step(config.train.rng_seed, 0);
    const auto prompts = make_prompt_set(config);
    const auto seeds = bootstrap_seed_questions(backend, config.train, config.zero_seed_count, rng, &prompts);
    state.questions = ingest_seed(seeds, /*allow_empty=*/true);
  } else {
    const auto seeds = load_seed_file(config.seed_file);
    state.questions = ingest_seed(seeds, config.zero_setting);
  }
  return state;
}

RunResult run_training(const RunConfig& config, Backend& backend, TrainingState initial,
                       const RunOptions& options) {
  const fs::path dir = options.output_dir.empty() ? fs::path(config.output_dir) : options.output_dir;
  const auto manifest = dir / "manifest.jsonl";
  const auto steps_file = dir / "steps.jsonl";
  const auto rollouts_file = dir / "rollouts.jsonl";
  const json resolved = to_manifest_json(config);
  const auto hash = config_hash(config);
  const auto prompts = make_prompt_set(config);

  TrainingState state;
  if (options.resume) {
    json header;
    json last_snapshot;
    read_jsonl(manifest, [&](const json& r, std::size_t) {
      const auto type = r.at("type").get<std::string>();
      if (type == "run") header = r;
      if (type == "snapshot") last_snapshot = r;
    });
    if (header.is_null()) throw Error(manifest.string() + " has no run header");
    if (header.at("config_hash").get<std::string>() != hash) {
      auto diff = json_differences(header.at("config"), resolved);
      std::string what = "cannot resume " + dir.string() + ": config differs from the stored run";
      for (const auto& d : diff) what += "\n  " + d;
      throw ConfigMismatchError(what, std::move(diff));
    }
    if (last_snapshot.is_null()) throw Error(manifest.string() + " has no snapshot to resume from");
    state = restore_snapshot(dir, last_snapshot, backend);
    const int at = state.completed_steps;
    auto keep = [at](const json& r) { return r.at("step").get<int>() <= at; };
    filter_jsonl(steps_file, keep);
    filter_jsonl(rollouts_file, keep);
    append_jsonl(manifest, json{{"type", "resume"}, {"from_step", at}});
    spdlog::info("resuming {} from step {}", dir.string(), at);
  } else {
    if (fs::exists(manifest)) {
      throw Error(dir.string() + " already holds a run; resume it or choose another directory");
    }
    fs::create_directories(dir);
    state = std::move(initial);
    append_jsonl(manifest, json{{"type", "run"},
                                {"format", "mae-run/1"},
                                {"config", resolved},
                                {"config_hash", hash},
                                {"rng_seed", config.train.rng_seed},
                                {"total_steps", config.train.total_steps},
                                {"backend", backend.name()},
                                {"initial_pool_size", state.questions.size()}});
    write_jsonl(steps_file, {});
    write_jsonl(rollouts_file, {});
    write_snapshot(dir, state, backend);
  }

  RunResult result;
  const int last = std::min(config.train.total_steps,
                            options.stop_after_step.value_or(config.train.total_steps));
  while (state.completed_steps < last) {
    const int step = state.completed_steps + 1;
    Rng rng = Rng::for_step(config.train.rng_seed, step);
    StepOptions step_options;
    step_options.prompts = &prompts;
    auto outcome = run_training_step(state, config.train, backend, rng, step_options);

    append_jsonl(steps_file, json(outcome.report));
    std::vector<json> rollout_lines(outcome.rollouts.begin(), outcome.rollouts.end());
    append_jsonl(rollouts_file, rollout_lines);
    if (options.on_step) options.on_step(outcome.report);
    result.reports.push_back(std::move(outcome.report));

    if (step % config.snapshot_every == 0 || step == config.train.total_steps) {
      write_snapshot(dir, state, backend);
    }
  }
  result.completed_steps = state.completed_steps;
  result.finished = state.completed_steps >= config.train.total_steps;
  if (result.finished) append_jsonl(manifest, json{{"type", "complete"}, {"step", state.completed_steps}});
  return result;
}

std::vector<StepReport> replay_reports(const fs::path& manifest_path, int first, int last) {
  bool has_header = false;
  read_jsonl(manifest_path, [&](const json& r, std::size_t) {
    has_header = has_header || r.at("type").get<std::string>() == "run";
  });
  if (!has_header) throw Error(manifest_path.string() + " is not a run manifest");
  std::vector<StepReport> out;
  read_jsonl(manifest_path.parent_path() / "steps.jsonl", [&](const json& r, std::size_t) {
    auto report = r.get<StepReport>();
    if (report.step >= first && report.step <= last) out.push_back(std::move(report));
  });
  return out;
}

}  // namespace mae
