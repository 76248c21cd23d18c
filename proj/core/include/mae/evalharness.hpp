#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mae/backend.hpp"
#include "mae/structured_output.hpp"

namespace mae {

enum class EvalCategory { kMath, kMultipleChoice, kTruthfulness, kGeneral };

std::string_view to_string(EvalCategory category);
EvalCategory eval_category_from_string(std::string_view name);

struct EvalItem {
  std::string question;
  std::string ground_truth;
  EvalCategory category = EvalCategory::kGeneral;
};

/// Grader prompts use {question}, {ground_truth} and {model_answer}.
std::string_view default_grader_prompt(EvalCategory category);

struct GraderConfig {
  std::string model = "nvidia/llama-3.1-nemotron-70b-instruct";
  double temperature = 1.0;
  double top_p = 0.95;
  int max_tokens = 1000;
  int parallelism = 1;
  std::map<EvalCategory, std::string> prompts;

  GraderConfig();
  /// Reads the fields above; "prompts" maps category names to bodies.
  static GraderConfig from_json(const json& section);
};

struct GradeResult {
  Verdict verdict = Verdict::kUnparsable;
  std::string grader_output;
  /// Set when the grader could not be reached.
  std::string error;
};

/// The text handed to the grader: the first `<answer>` segment of the
/// model output when there is one, else the whole output.
std::string graded_answer_text(std::string_view model_answer);

/// Grades one answer. A TransportError yields UNPARSABLE with the error
/// noted; other backend errors propagate.
GradeResult grade_one(const EvalItem& item, std::string_view model_answer, Backend& grader,
                      const GraderConfig& config);

struct EvalReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t unparsable = 0;
  double accuracy = 0.0;
  std::vector<GradeResult> items;
};

/// Grades every item (concurrently up to config.parallelism) and
/// aggregates. Throws std::invalid_argument for an empty set or when items
/// and answers differ in length, before any grading.
EvalReport evaluate_set(std::span<const EvalItem> items, std::span<const std::string> answers,
                        Backend& grader, const GraderConfig& config);

/// `{"question", "ground_truth", "category"}` lines.
std::vector<EvalItem> load_benchmark(const std::filesystem::path& path);
/// `{"answer": ...}` lines (a bare JSON string per line also works).
std::vector<std::string> load_answers(const std::filesystem::path& path);

/// One verdict line per item followed by a summary line.
void write_eval_report(const std::filesystem::path& path, std::span<const EvalItem> items,
                       const EvalReport& report);

json summary_json(const EvalReport& report);

}  // namespace mae
