#include "cli.hpp"

#include <algorithm>
#include <climits>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mae/config.hpp"
#include "mae/datapools.hpp"
#include "mae/evalharness.hpp"
#include "mae/runner.hpp"

namespace mae::cli {

namespace fs = std::filesystem;

namespace {

void add_overrides(CLI::App& app, Overrides& o) {
  app.add_option("--seed", o.seed, "RNG seed (overrides the config)");
  app.add_option("--backend", o.backend, "Backend kind")
      ->check(CLI::IsMember({"http", "scripted", "reference"}));
  app.add_option("--parallelism", o.parallelism, "Concurrent generations")
      ->check(CLI::PositiveNumber);
  app.add_option("--snapshot-every", o.snapshot_every, "Snapshot interval in steps")
      ->check(CLI::PositiveNumber);
}

std::pair<int, int> parse_step_range(const std::string& text) {
  // "A:B", "A:" or "A"
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || v < 0) throw CLI::ValidationError("--steps", "bad step range '" + text + "'");
    return v;
  };
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    const int v = to_int(text);
    return {v, v};
  }
  const auto a = text.substr(0, colon);
  const auto b = text.substr(colon + 1);
  return {a.empty() ? 1 : to_int(a), b.empty() ? -1 : to_int(b)};
}

RunConfig load_with_overrides(const std::string& path, const Overrides& o) {
  auto config = load_run_config(path);
  if (o.seed) config.train.rng_seed = *o.seed;
  if (o.parallelism) config.train.parallelism = *o.parallelism;
  if (o.snapshot_every) config.snapshot_every = *o.snapshot_every;
  if (o.backend && config.backend.value("kind", std::string{}) != *o.backend) {
    config.backend = default_backend_config(*o.backend);
  }
  return config;
}

int do_run(const RunCommand& cmd, std::ostream& out) {
  const auto config = load_with_overrides(cmd.config_path, cmd.overrides);
  auto backend = make_backend(config.backend);
  RunOptions options;
  options.output_dir = cmd.output_dir.value_or(config.output_dir);
  options.resume = cmd.resume;
  options.stop_after_step = cmd.stop_after_step;
  options.on_step = [&](const StepReport& r) { out << summarize(r) << '\n' << std::flush; };

  TrainingState state;
  if (!cmd.resume) state = initial_state(config, *backend);
  const auto result = run_training(config, *backend, std::move(state), options);
  out << (result.finished ? "run complete" : "run stopped") << " at step " << result.completed_steps
      << " of " << config.train.total_steps << " (" << options.output_dir.string() << ")\n";
  return 0;
}

int do_eval(const EvalCommand& cmd, std::ostream& out) {
  const auto config = load_with_overrides(cmd.config_path, cmd.overrides);
  auto grader_config = GraderConfig::from_json(config.grader);
  if (cmd.overrides.parallelism) grader_config.parallelism = *cmd.overrides.parallelism;
  const auto grader_section = (!cmd.overrides.backend && config.grader.contains("backend"))
                                  ? config.grader.at("backend")
                                  : config.backend;
  auto grader = make_backend(grader_section);

  const auto items = load_benchmark(cmd.benchmark_path);
  const auto answers = load_answers(cmd.answers_path);
  const auto report = evaluate_set(items, answers, *grader, grader_config);
  const fs::path report_path = cmd.report_path ? fs::path(*cmd.report_path)
                                               : fs::path(config.output_dir) / "eval.jsonl";
  if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
  write_eval_report(report_path, items, report);
  out << "accuracy " << report.accuracy << " (" << report.correct << " correct, " << report.incorrect
      << " incorrect, " << report.unparsable << " unparsable of " << report.total << ") -> "
      << report_path.string() << '\n';
  return 0;
}

void describe_pool(const QuestionPool& pool, std::ostream& out) {
  std::map<std::string, std::size_t> by_source;
  std::size_t generated = 0;
  for (const auto& q : pool.questions()) {
    if (const auto* s = std::get_if<SeedOrigin>(&q.origin)) {
      ++by_source[s->source];
    } else {
      ++generated;
    }
  }
  out << "questions " << pool.size() << " (seed " << pool.size() - generated << ", generated "
      << generated << ")\n";
  for (const auto& [source, n] : by_source) out << "  " << source << ' ' << n << '\n';
  out << "admissions " << pool.admitted_count() << " admitted, " << pool.rejected_count()
      << " rejected\n";
  out << "content hash " << pool.content_hash() << '\n';
}

int do_pool(const PoolCommand& cmd, std::ostream& out) {
  switch (cmd.action) {
    case PoolAction::kInspect: {
      fs::path path = cmd.path;
      if (fs::is_directory(path)) {
        const auto pairs = path / "pairs.jsonl";
        path /= "questions.jsonl";
        describe_pool(QuestionPool::restore(path), out);
        if (fs::exists(pairs)) out << "pairs " << PairPool::restore(pairs).size() << '\n';
      } else {
        describe_pool(QuestionPool::restore(path), out);
      }
      return 0;
    }
    case PoolAction::kSnapshot: {
      const auto config = load_with_overrides(*cmd.config_path, cmd.overrides);
      auto backend = make_backend(config.backend);
      const auto state = initial_state(config, *backend);
      state.questions.snapshot(cmd.path);
      out << "wrote " << state.questions.size() << " questions to " << cmd.path << '\n';
      return 0;
    }
    case PoolAction::kRestore: {
      const auto pool = QuestionPool::restore(cmd.path);
      describe_pool(pool, out);
      if (cmd.output) {
        pool.snapshot(*cmd.output);
        out << "wrote " << *cmd.output << '\n';
      }
      return 0;
    }
  }
  return 1;
}

int do_replay(const ReplayCommand& cmd, std::ostream& out) {
  const int last = cmd.last_step < 0 ? INT_MAX : cmd.last_step;
  for (const auto& r : replay_reports(cmd.manifest_path, cmd.first_step, last)) {
    out << summarize(r) << '\n';
  }
  return 0;
}

}  // namespace

Command parse_command(const std::vector<std::string>& args) {
  CLI::App app{"Multi-agent self-play training loop", "mae"};
  app.require_subcommand(1);
  app.fallthrough(false);

  RunCommand run;
  auto* run_app = app.add_subcommand("run", "Train from a config");
  run_app->add_option("--config", run.config_path, "Run config (JSON)")->required();
  run_app->add_option("--out", run.output_dir, "Run directory (default: config output_dir)");
  run_app->add_flag("--resume", run.resume, "Continue the run in the output directory");
  run_app->add_option("--stop-after", run.stop_after_step, "Stop after this step")
      ->check(CLI::NonNegativeNumber);
  add_overrides(*run_app, run.overrides);

  EvalCommand eval;
  auto* eval_app = app.add_subcommand("eval", "Grade benchmark answers");
  eval_app->add_option("--config", eval.config_path, "Config with a grader section")->required();
  eval_app->add_option("--benchmark", eval.benchmark_path, "Benchmark items (JSONL)")->required();
  eval_app->add_option("--answers", eval.answers_path, "Model answers (JSONL)")->required();
  eval_app->add_option("--report", eval.report_path, "Report path (default: <output_dir>/eval.jsonl)");
  add_overrides(*eval_app, eval.overrides);

  PoolCommand pool;
  auto* pool_app = app.add_subcommand("pool", "Inspect, snapshot or restore a question pool");
  pool_app->require_subcommand(1);
  auto* inspect = pool_app->add_subcommand("inspect", "Summarize a pool file or snapshot directory");
  inspect->add_option("path", pool.path, "Pool file or snapshot directory")->required();
  auto* snapshot = pool_app->add_subcommand("snapshot", "Write the seed pool of a config");
  snapshot->add_option("path", pool.path, "Destination file")->required();
  snapshot->add_option("--config", pool.config_path, "Run config (JSON)")->required();
  add_overrides(*snapshot, pool.overrides);
  auto* restore = pool_app->add_subcommand("restore", "Validate a pool file and optionally rewrite it");
  restore->add_option("path", pool.path, "Pool file")->required();
  restore->add_option("--out", pool.output, "Re-serialize the restored pool here");

  ReplayCommand replay;
  std::string range;
  auto* replay_app = app.add_subcommand("replay", "Print recorded step reports");
  replay_app->add_option("manifest", replay.manifest_path, "manifest.jsonl of a run")->required();
  replay_app->add_option("--steps", range, "Step range A:B, A: or A");

  if (!args.empty() && !args.front().empty() && args.front().front() != '-' &&
      app.get_subcommand_no_throw(args.front()) == nullptr) {
    throw UsageError("unknown subcommand '" + args.front() + "'", app.help());
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (!range.empty()) std::tie(replay.first_step, replay.last_step) = parse_step_range(range);
  } catch (const CLI::CallForHelp&) {
    return HelpCommand{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    return HelpCommand{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what(), app.help());
  }

  if (run_app->parsed()) return run;
  if (eval_app->parsed()) return eval;
  if (replay_app->parsed()) return replay;
  pool.action = inspect->parsed() ? PoolAction::kInspect
                : snapshot->parsed() ? PoolAction::kSnapshot
                                     : PoolAction::kRestore;
  return pool;
}

int execute(const Command& command, std::ostream& out, std::ostream& err) {
  try {
    return std::visit(
        [&](const auto& c) -> int {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, RunCommand>) {
            return do_run(c, out);
          } else if constexpr (std::is_same_v<T, EvalCommand>) {
            return do_eval(c, out);
          } else if constexpr (std::is_same_v<T, PoolCommand>) {
            return do_pool(c, out);
          } else if constexpr (std::is_same_v<T, ReplayCommand>) {
            return do_replay(c, out);
          } else {
            out << c.text;
            return 0;
          }
        },
        command);
  } catch (const ConfigMismatchError& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& d : e.differences()) err << "  " << d << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Command command;
  try {
    command = parse_command(args);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << e.usage();
    return 2;
  }
  return execute(command, out, err);
}

}  // namespace mae::cli
