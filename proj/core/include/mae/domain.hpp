#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace mae {

using json = nlohmann::json;

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Role { kProposer, kSolver, kJudge };

inline constexpr std::array<Role, 3> kAllRoles{Role::kProposer, Role::kSolver, Role::kJudge};

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);

/// Three-level format grade: exactly one tag pair, several, or none.
enum class FormatLevel { kNone, kMultiple, kExact };

double format_value(FormatLevel level);
FormatLevel format_level_from_value(double value);

// Question origins.
struct SeedOrigin {
  std::string source;
  bool operator==(const SeedOrigin&) const = default;
};
struct ReferenceOrigin {
  std::string parent_id;
  int step = 0;
  bool operator==(const ReferenceOrigin&) const = default;
};
struct ScratchOrigin {
  int step = 0;
  bool operator==(const ScratchOrigin&) const = default;
};
using Origin = std::variant<SeedOrigin, ReferenceOrigin, ScratchOrigin>;

inline bool is_seed(const Origin& origin) { return std::holds_alternative<SeedOrigin>(origin); }

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

/// 64-bit FNV-1a. Stable across platforms, used for ids and file hashes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

/// Content-hash id of a question text ("q-" + 16 hex digits of the
/// whitespace-normalized text).
std::string question_id_for(std::string_view text);

struct Question {
  std::string id;
  std::string text;
  Origin origin;
  std::optional<double> quality_score;

  bool operator==(const Question&) const = default;
};

/// Builds a question with a content-hash id. Throws std::invalid_argument on
/// empty text or a quality score outside [0,1].
Question make_question(std::string text, Origin origin,
                       std::optional<double> quality_score = std::nullopt);

/// A Solver answer. Construct through parse_answer() so that text and
/// format_level are always derived from raw_output.
struct Answer {
  std::string question_id;
  std::string text;
  std::string raw_output;
  FormatLevel format_level = FormatLevel::kNone;

  bool operator==(const Answer&) const = default;
};

struct QAPair {
  Question question;
  Answer answer;
  int step_created = 0;

  bool operator==(const QAPair&) const = default;
};

enum class VerdictTarget { kQuestion, kAnswer };

struct JudgeVerdict {
  VerdictTarget target = VerdictTarget::kAnswer;
  std::optional<int> raw_score;
  double normalized = 0.0;
  bool parse_failed = true;
  std::string raw_output;
  FormatLevel format_level = FormatLevel::kNone;

  bool operator==(const JudgeVerdict&) const = default;
};

struct ProposerWeights {
  double quality = 1.0 / 3.0;
  double difficulty = 1.0 / 3.0;
  double format = 1.0 / 3.0;
  bool operator==(const ProposerWeights&) const = default;
};

struct SolverWeights {
  double judge = 0.5;
  double format = 0.5;
  bool operator==(const SolverWeights&) const = default;
};

struct RewardWeights {
  ProposerWeights proposer;
  SolverWeights solver;
  bool operator==(const RewardWeights&) const = default;
};

struct RewardBreakdown {
  Role role = Role::kProposer;
  std::map<std::string, double> components;
  double total = 0.0;
  bool operator==(const RewardBreakdown&) const = default;
};

struct RolloutRecord {
  Role role = Role::kSolver;
  std::string prompt;
  std::string completion;
  double reward = 0.0;
  std::optional<double> advantage;
  int step = 0;
  bool operator==(const RolloutRecord&) const = default;
};

struct AdvantageStats {
  Role role = Role::kSolver;
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
  bool operator==(const AdvantageStats&) const = default;
};

struct TrainConfig {
  int total_steps = 300;
  int batch_size = 128;
  int n_difficulty_samples = 5;
  double quality_threshold = 0.7;
  // 0.0 no reference, 0.5 half reference, 1.0 with reference.
  double reference_probability = 0.5;
  double neutral_score = 0.5;
  double temperature = 1.0;
  double top_p = 1.0;
  int max_new_units = 8192;
  std::uint64_t rng_seed = 0;
  int parallelism = 1;
  double advantage_epsilon = 1e-8;
  RewardWeights weights;

  /// Throws std::invalid_argument naming the first out-of-range field.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

void to_json(json& j, const Origin& o);
void from_json(const json& j, Origin& o);
void to_json(json& j, const Question& q);
void from_json(const json& j, Question& q);
void to_json(json& j, const Answer& a);
void from_json(const json& j, Answer& a);
void to_json(json& j, const QAPair& p);
void from_json(const json& j, QAPair& p);
void to_json(json& j, const JudgeVerdict& v);
void from_json(const json& j, JudgeVerdict& v);
void to_json(json& j, const RewardWeights& w);
void from_json(const json& j, RewardWeights& w);
void to_json(json& j, const RewardBreakdown& b);
void from_json(const json& j, RewardBreakdown& b);
void to_json(json& j, const RolloutRecord& r);
void from_json(const json& j, RolloutRecord& r);
void to_json(json& j, const AdvantageStats& s);
void from_json(const json& j, AdvantageStats& s);
void to_json(json& j, const TrainConfig& c);
void from_json(const json& j, TrainConfig& c);

}  // namespace mae
