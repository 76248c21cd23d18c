#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mae/domain.hpp"

namespace mae {

/// Inner texts of the non-overlapping `<tag>...</tag>` pairs of a generation,
/// in document order.
struct TagExtraction {
  std::string tag_name;
  std::vector<std::string> segments;

  std::size_t well_formed_count() const { return segments.size(); }
};

/// Scans left to right for literal `<tag>` / `</tag>` pairs. An opening tag
/// without a later closing tag contributes nothing, and the first closing tag
/// ends the earliest open segment (same-name nesting is not recognized).
/// Throws std::invalid_argument if tag_name is empty or contains '<' or '>'.
TagExtraction extract_tagged(std::string_view text, std::string_view tag_name);

/// 1.0 for exactly one pair, 0.5 for several, 0.0 for none.
FormatLevel format_reward(const TagExtraction& extraction);
FormatLevel format_reward_for_count(std::size_t well_formed_count);

struct ScoreParse {
  std::optional<int> raw_score;
  double normalized = 0.0;
  bool parse_failed = true;
  FormatLevel format_level = FormatLevel::kNone;
};

/// Reads `<score>` tags. Only segments whose trimmed content is an integer in
/// [1,10] are valid; the format level grades the number of valid segments and
/// the first valid one wins. With no valid segment the result carries
/// `neutral` and parse_failed.
ScoreParse parse_score(std::string_view judge_output, double neutral);

/// parse_score() packaged as a full verdict for the given target.
JudgeVerdict make_verdict(VerdictTarget target, std::string raw_output, double neutral);

enum class Verdict { kTrue, kFalse, kUnparsable };

std::string_view to_string(Verdict verdict);

/// TRUE/FALSE iff there is exactly one `<answer>` segment reading "true" or
/// "false" (case-insensitive, trimmed).
Verdict parse_verdict(std::string_view grader_output);

/// Solver answer derived from a raw generation: text is the first `<answer>`
/// segment, or the trimmed raw output when no pair is present.
Answer parse_answer(std::string question_id, std::string raw_output);

/// Question text proposed in a raw generation: the first `<question>` segment,
/// or the remainder after an unclosed `<question>`. Empty results are nullopt.
std::optional<std::string> extract_question(std::string_view proposer_output);

std::string trim(std::string_view text);

}  // namespace mae
