#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mae::cli {

/// Flags shared by every subcommand that loads a config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backend;
  std::optional<int> parallelism;
  std::optional<int> snapshot_every;
};

struct RunCommand {
  std::string config_path;
  Overrides overrides;
  std::optional<std::string> output_dir;
  bool resume = false;
  std::optional<int> stop_after_step;
};

struct EvalCommand {
  std::string config_path;
  std::string benchmark_path;
  std::string answers_path;
  std::optional<std::string> report_path;
  Overrides overrides;
};

enum class PoolAction { kInspect, kSnapshot, kRestore };

struct PoolCommand {
  PoolAction action = PoolAction::kInspect;
  std::string path;
  /// snapshot: config whose seed pool is written to `path`.
  std::optional<std::string> config_path;
  /// restore: where the restored pool is re-serialized.
  std::optional<std::string> output;
  Overrides overrides;
};

struct ReplayCommand {
  std::string manifest_path;
  int first_step = 1;
  int last_step = -1;  // -1: through the last recorded step
};

struct HelpCommand {
  std::string text;
};

using Command = std::variant<RunCommand, EvalCommand, PoolCommand, ReplayCommand, HelpCommand>;

/// Raised for unknown subcommands, missing required flags and malformed
/// values. what() holds the message and usage() the text to print.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& what, std::string usage)
      : std::runtime_error(what), usage_(std::move(usage)) {}
  const std::string& usage() const { return usage_; }

 private:
  std::string usage_;
};

/// args excludes the program name.
Command parse_command(const std::vector<std::string>& args);

/// Executes a command. Returns the process exit code: 0 iff the operation
/// completed without error.
int execute(const Command& command, std::ostream& out, std::ostream& err);

/// parse + execute, with usage errors reported on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mae::cli
