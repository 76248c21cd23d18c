#include "mae/structured_output.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

namespace mae {

std::string trim(std::string_view text) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return std::string(text);
}

TagExtraction extract_tagged(std::string_view text, std::string_view tag_name) {
  if (tag_name.empty() || tag_name.find_first_of("<>") != std::string_view::npos) {
    throw std::invalid_argument("tag name must be non-empty and free of angle brackets");
  }
  const std::string open = "<" + std::string(tag_name) + ">";
  const std::string close = "</" + std::string(tag_name) + ">";

  TagExtraction out;
  out.tag_name = std::string(tag_name);
  std::size_t pos = 0;
  while (true) {
    const auto start = text.find(open, pos);
    if (start == std::string_view::npos) break;
    const auto body = start + open.size();
    const auto end = text.find(close, body);
    if (end == std::string_view::npos) break;
    out.segments.emplace_back(text.substr(body, end - body));
    pos = end + close.size();
  }
  return out;
}

FormatLevel format_reward_for_count(std::size_t well_formed_count) {
  if (well_formed_count == 1) return FormatLevel::kExact;
  if (well_formed_count > 1) return FormatLevel::kMultiple;
  return FormatLevel::kNone;
}

FormatLevel format_reward(const TagExtraction& extraction) {
  return format_reward_for_count(extraction.well_formed_count());
}

namespace {

std::optional<int> parse_score_value(std::string_view segment) {
  const std::string body = trim(segment);
  if (body.empty()) return std::nullopt;
  int value = 0;
  const auto* first = body.data();
  const auto* last = body.data() + body.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  if (value < 1 || value > 10) return std::nullopt;
  return value;
}

}  // namespace

ScoreParse parse_score(std::string_view judge_output, double neutral) {
  if (!(neutral >= 0.0 && neutral <= 1.0)) {
    throw std::invalid_argument("neutral score must lie in [0,1]");
  }
  const auto extraction = extract_tagged(judge_output, "score");
  ScoreParse out;
  std::size_t valid = 0;
  for (const auto& segment : extraction.segments) {
    if (auto value = parse_score_value(segment)) {
      if (valid == 0) out.raw_score = *value;
      ++valid;
    }
  }
  out.format_level = format_reward_for_count(valid);
  if (out.raw_score) {
    out.parse_failed = false;
    out.normalized = static_cast<double>(*out.raw_score) / 10.0;
  } else {
    out.parse_failed = true;
    out.normalized = neutral;
  }
  return out;
}

JudgeVerdict make_verdict(VerdictTarget target, std::string raw_output, double neutral) {
  const auto parsed = parse_score(raw_output, neutral);
  JudgeVerdict v;
  v.target = target;
  v.raw_score = parsed.raw_score;
  v.normalized = parsed.normalized;
  v.parse_failed = parsed.parse_failed;
  v.format_level = parsed.format_level;
  v.raw_output = std::move(raw_output);
  return v;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kTrue: return "TRUE";
    case Verdict::kFalse: return "FALSE";
    case Verdict::kUnparsable: return "UNPARSABLE";
  }
  return "UNPARSABLE";
}

Verdict parse_verdict(std::string_view grader_output) {
  const auto extraction = extract_tagged(grader_output, "answer");
  if (extraction.well_formed_count() != 1) return Verdict::kUnparsable;
  std::string body = trim(extraction.segments.front());
  std::transform(body.begin(), body.end(), body.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (body == "true") return Verdict::kTrue;
  if (body == "false") return Verdict::kFalse;
  return Verdict::kUnparsable;
}

Answer parse_answer(std::string question_id, std::string raw_output) {
  const auto extraction = extract_tagged(raw_output, "answer");
  Answer a;
  a.question_id = std::move(question_id);
  a.format_level = format_reward(extraction);
  a.text = extraction.segments.empty() ? trim(raw_output) : trim(extraction.segments.front());
  a.raw_output = std::move(raw_output);
  return a;
}

std::optional<std::string> extract_question(std::string_view proposer_output) {
  const auto extraction = extract_tagged(proposer_output, "question");
  std::string text;
  if (!extraction.segments.empty()) {
    text = trim(extraction.segments.front());
  } else {
    static constexpr std::string_view kOpen = "<question>";
    const auto start = proposer_output.find(kOpen);
    if (start != std::string_view::npos) text = trim(proposer_output.substr(start + kOpen.size()));
  }
  if (normalize_whitespace(text).empty()) return std::nullopt;
  return text;
}

}  // namespace mae
