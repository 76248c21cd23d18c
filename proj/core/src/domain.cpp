#include "mae/domain.hpp"

#include <cctype>
#include <cmath>

#include "mae/structured_output.hpp"

namespace mae {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kProposer: return "proposer";
    case Role::kSolver: return "solver";
    case Role::kJudge: return "judge";
  }
  return "unknown";
}

Role role_from_string(std::string_view name) {
  if (name == "proposer") return Role::kProposer;
  if (name == "solver") return Role::kSolver;
  if (name == "judge") return Role::kJudge;
  throw std::invalid_argument("unknown role '" + std::string(name) + "'");
}

double format_value(FormatLevel level) {
  switch (level) {
    case FormatLevel::kExact: return 1.0;
    case FormatLevel::kMultiple: return 0.5;
    case FormatLevel::kNone: return 0.0;
  }
  return 0.0;
}

FormatLevel format_level_from_value(double value) {
  if (value == 1.0) return FormatLevel::kExact;
  if (value == 0.5) return FormatLevel::kMultiple;
  if (value == 0.0) return FormatLevel::kNone;
  throw std::invalid_argument("format level must be 1.0, 0.5 or 0.0");
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
    value >>= 4;
  }
  return out;
}

std::string question_id_for(std::string_view text) {
  return "q-" + hex64(fnv1a64(normalize_whitespace(text)));
}

Question make_question(std::string text, Origin origin, std::optional<double> quality_score) {
  if (normalize_whitespace(text).empty()) {
    throw std::invalid_argument("question text must be non-empty");
  }
  if (quality_score && !(*quality_score >= 0.0 && *quality_score <= 1.0)) {
    throw std::invalid_argument("quality score must lie in [0,1]");
  }
  Question q;
  q.id = question_id_for(text);
  q.text = std::move(text);
  q.origin = std::move(origin);
  q.quality_score = quality_score;
  return q;
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw std::invalid_argument(std::string("config field out of range: ") + field);
  };
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  require(total_steps > 0, "total_steps");
  require(batch_size > 0, "batch_size");
  require(n_difficulty_samples >= 1, "n_difficulty_samples");
  require(unit(quality_threshold), "quality_threshold");
  require(unit(reference_probability), "reference_probability");
  require(unit(neutral_score), "neutral_score");
  require(temperature >= 0.0 && std::isfinite(temperature), "temperature");
  require(top_p > 0.0 && top_p <= 1.0, "top_p");
  require(max_new_units > 0, "max_new_units");
  require(parallelism >= 1, "parallelism");
  require(advantage_epsilon > 0.0, "advantage_epsilon");
  const auto& p = weights.proposer;
  const auto& s = weights.solver;
  require(p.quality >= 0 && p.difficulty >= 0 && p.format >= 0, "weights.proposer");
  require(s.judge >= 0 && s.format >= 0, "weights.solver");
}

// --- serialization -------------------------------------------------------

void to_json(json& j, const Origin& o) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SeedOrigin>) {
          j = json{{"kind", "seed"}, {"source", v.source}};
        } else if constexpr (std::is_same_v<T, ReferenceOrigin>) {
          j = json{{"kind", "reference"}, {"parent_id", v.parent_id}, {"step", v.step}};
        } else {
          j = json{{"kind", "scratch"}, {"step", v.step}};
        }
      },
      o);
}

void from_json(const json& j, Origin& o) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "seed") {
    o = SeedOrigin{j.value("source", std::string{})};
  } else if (kind == "reference") {
    o = ReferenceOrigin{j.at("parent_id").get<std::string>(), j.at("step").get<int>()};
  } else if (kind == "scratch") {
    o = ScratchOrigin{j.at("step").get<int>()};
  } else {
    throw std::invalid_argument("unknown origin kind '" + kind + "'");
  }
}

void to_json(json& j, const Question& q) {
  j = json{{"id", q.id}, {"text", q.text}, {"origin", q.origin}};
  j["quality_score"] = q.quality_score ? json(*q.quality_score) : json(nullptr);
}

void from_json(const json& j, Question& q) {
  std::optional<double> quality;
  if (j.contains("quality_score") && !j.at("quality_score").is_null()) {
    quality = j.at("quality_score").get<double>();
  }
  q = make_question(j.at("text").get<std::string>(), j.at("origin").get<Origin>(), quality);
  if (j.contains("id") && j.at("id").get<std::string>() != q.id) {
    throw std::invalid_argument("question id does not match its content hash");
  }
}

void to_json(json& j, const Answer& a) {
  j = json{{"question_id", a.question_id},
           {"text", a.text},
           {"raw_output", a.raw_output},
           {"format_level", format_value(a.format_level)}};
}

void from_json(const json& j, Answer& a) {
  a = parse_answer(j.at("question_id").get<std::string>(), j.at("raw_output").get<std::string>());
  if (j.contains("format_level") &&
      format_level_from_value(j.at("format_level").get<double>()) != a.format_level) {
    throw std::invalid_argument("answer format_level disagrees with raw_output");
  }
}

void to_json(json& j, const QAPair& p) {
  j = json{{"question", p.question}, {"answer", p.answer}, {"step_created", p.step_created}};
}

void from_json(const json& j, QAPair& p) {
  p.question = j.at("question").get<Question>();
  p.answer = j.at("answer").get<Answer>();
  p.step_created = j.at("step_created").get<int>();
  if (p.answer.question_id != p.question.id) {
    throw std::invalid_argument("pair answer refers to a different question");
  }
  if (p.step_created < 0) throw std::invalid_argument("step_created must be >= 0");
}

void to_json(json& j, const JudgeVerdict& v) {
  j = json{{"target", v.target == VerdictTarget::kQuestion ? "question" : "answer"},
           {"raw_score", v.raw_score ? json(*v.raw_score) : json(nullptr)},
           {"normalized", v.normalized},
           {"parse_failed", v.parse_failed},
           {"raw_output", v.raw_output},
           {"format_level", format_value(v.format_level)}};
}

void from_json(const json& j, JudgeVerdict& v) {
  const auto target = j.at("target").get<std::string>();
  if (target != "question" && target != "answer") {
    throw std::invalid_argument("unknown verdict target '" + target + "'");
  }
  v.target = target == "question" ? VerdictTarget::kQuestion : VerdictTarget::kAnswer;
  v.raw_score.reset();
  if (!j.at("raw_score").is_null()) v.raw_score = j.at("raw_score").get<int>();
  v.normalized = j.at("normalized").get<double>();
  v.parse_failed = j.at("parse_failed").get<bool>();
  v.raw_output = j.at("raw_output").get<std::string>();
  v.format_level = format_level_from_value(j.at("format_level").get<double>());
}

void to_json(json& j, const RewardWeights& w) {
  j = json{{"proposer",
            {{"quality", w.proposer.quality},
             {"difficulty", w.proposer.difficulty},
             {"format", w.proposer.format}}},
           {"solver", {{"judge", w.solver.judge}, {"format", w.solver.format}}}};
}

void from_json(const json& j, RewardWeights& w) {
  w = RewardWeights{};
  if (j.contains("proposer")) {
    const auto& p = j.at("proposer");
    w.proposer.quality = p.value("quality", w.proposer.quality);
    w.proposer.difficulty = p.value("difficulty", w.proposer.difficulty);
    w.proposer.format = p.value("format", w.proposer.format);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    w.solver.judge = s.value("judge", w.solver.judge);
    w.solver.format = s.value("format", w.solver.format);
  }
}

void to_json(json& j, const RewardBreakdown& b) {
  j = json{{"role", to_string(b.role)}, {"components", b.components}, {"total", b.total}};
}

void from_json(const json& j, RewardBreakdown& b) {
  b.role = role_from_string(j.at("role").get<std::string>());
  b.components = j.at("components").get<std::map<std::string, double>>();
  b.total = j.at("total").get<double>();
}

void to_json(json& j, const RolloutRecord& r) {
  j = json{{"role", to_string(r.role)},
           {"prompt", r.prompt},
           {"completion", r.completion},
           {"reward", r.reward},
           {"advantage", r.advantage ? json(*r.advantage) : json(nullptr)},
           {"step", r.step}};
}

void from_json(const json& j, RolloutRecord& r) {
  r.role = role_from_string(j.at("role").get<std::string>());
  r.prompt = j.at("prompt").get<std::string>();
  r.completion = j.at("completion").get<std::string>();
  r.reward = j.at("reward").get<double>();
  r.advantage.reset();
  if (!j.at("advantage").is_null()) r.advantage = j.at("advantage").get<double>();
  r.step = j.at("step").get<int>();
}

void to_json(json& j, const AdvantageStats& s) {
  j = json{{"role", to_string(s.role)}, {"mean", s.mean}, {"std", s.std}, {"count", s.count}};
}

void from_json(const json& j, AdvantageStats& s) {
  s.role = role_from_string(j.at("role").get<std::string>());
  s.mean = j.at("mean").get<double>();
  s.std = j.at("std").get<double>();
  s.count = j.at("count").get<std::size_t>();
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"total_steps", c.total_steps},
           {"batch_size", c.batch_size},
           {"n_difficulty_samples", c.n_difficulty_samples},
           {"quality_threshold", c.quality_threshold},
           {"reference_probability", c.reference_probability},
           {"neutral_score", c.neutral_score},
           {"temperature", c.temperature},
           {"top_p", c.top_p},
           {"max_new_units", c.max_new_units},
           {"rng_seed", c.rng_seed},
           {"parallelism", c.parallelism},
           {"advantage_epsilon", c.advantage_epsilon},
           {"weights", c.weights}};
}

void from_json(const json& j, TrainConfig& c) {
  TrainConfig d;
  c.total_steps = j.value("total_steps", d.total_steps);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.n_difficulty_samples = j.value("n_difficulty_samples", d.n_difficulty_samples);
  c.quality_threshold = j.value("quality_threshold", d.quality_threshold);
  c.reference_probability = j.value("reference_probability", d.reference_probability);
  c.neutral_score = j.value("neutral_score", d.neutral_score);
  c.temperature = j.value("temperature", d.temperature);
  c.top_p = j.value("top_p", d.top_p);
  c.max_new_units = j.value("max_new_units", d.max_new_units);
  c.rng_seed = j.value("rng_seed", d.rng_seed);
  c.parallelism = j.value("parallelism", d.parallelism);
  c.advantage_epsilon = j.value("advantage_epsilon", d.advantage_epsilon);
  c.weights = j.contains("weights") ? j.at("weights").get<RewardWeights>() : d.weights;
}

}  // namespace mae
