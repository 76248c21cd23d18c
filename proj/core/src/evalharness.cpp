#include "mae/evalharness.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "mae/jsonl.hpp"
#include "mae/prompt_texts.hpp"
#include "mae/prompts.hpp"

namespace mae {

std::string_view to_string(EvalCategory category) {
  switch (category) {
    case EvalCategory::kMath: return "math";
    case EvalCategory::kMultipleChoice: return "multiple_choice";
    case EvalCategory::kTruthfulness: return "truthfulness";
    case EvalCategory::kGeneral: return "general";
  }
  return "general";
}

EvalCategory eval_category_from_string(std::string_view name) {
  for (auto c : {EvalCategory::kMath, EvalCategory::kMultipleChoice, EvalCategory::kTruthfulness,
                 EvalCategory::kGeneral}) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown eval category '" + std::string(name) + "'");
}

std::string_view default_grader_prompt(EvalCategory category) {
  namespace t = prompt_texts;
  switch (category) {
    case EvalCategory::kMath: return t::kMathGraderPrompt;
    case EvalCategory::kMultipleChoice: return t::kMultipleChoiceGraderPrompt;
    case EvalCategory::kTruthfulness: return t::kTruthfulnessGraderPrompt;
    case EvalCategory::kGeneral: return t::kGeneralGraderPrompt;
  }
  return t::kGeneralGraderPrompt;
}

GraderConfig::GraderConfig() {
  for (auto c : {EvalCategory::kMath, EvalCategory::kMultipleChoice, EvalCategory::kTruthfulness,
                 EvalCategory::kGeneral}) {
    prompts[c] = std::string(default_grader_prompt(c));
  }
}

GraderConfig GraderConfig::from_json(const json& section) {
  GraderConfig g;
  g.model = section.value("model", g.model);
  g.temperature = section.value("temperature", g.temperature);
  g.top_p = section.value("top_p", g.top_p);
  g.max_tokens = section.value("max_tokens", g.max_tokens);
  g.parallelism = section.value("parallelism", g.parallelism);
  if (section.contains("prompts")) {
    for (const auto& [name, body] : section.at("prompts").items()) {
      g.prompts[eval_category_from_string(name)] = body.get<std::string>();
    }
  }
  return g;
}

std::string graded_answer_text(std::string_view model_answer) {
  const auto extraction = extract_tagged(model_answer, "answer");
  if (extraction.segments.empty()) return std::string(model_answer);
  return trim(extraction.segments.front());
}

GradeResult grade_one(const EvalItem& item, std::string_view model_answer, Backend& grader,
                      const GraderConfig& config) {
  GenerationRequest request;
  request.role = Role::kJudge;
  request.prompt = substitute(config.prompts.at(item.category),
                              {{"question", item.question},
                               {"ground_truth", item.ground_truth},
                               {"model_answer", graded_answer_text(model_answer)}},
                              {"question", "ground_truth", "model_answer"});
  request.temperature = config.temperature;
  request.top_p = config.top_p;
  request.max_new_units = config.max_tokens;

  GradeResult result;
  try {
    result.grader_output = grader.generate(request);
  } catch (const TransportError& e) {
    result.error = e.what();
    result.verdict = Verdict::kUnparsable;
    return result;
  }
  result.verdict = parse_verdict(result.grader_output);
  return result;
}

EvalReport evaluate_set(std::span<const EvalItem> items, std::span<const std::string> answers,
                        Backend& grader, const GraderConfig& config) {
  if (items.empty()) throw std::invalid_argument("evaluate_set: no items");
  if (items.size() != answers.size()) {
    throw std::invalid_argument("evaluate_set: " + std::to_string(items.size()) + " items but " +
                                std::to_string(answers.size()) + " answers");
  }

  EvalReport report;
  report.items.resize(items.size());
  std::vector<std::exception_ptr> errors(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1)) {
      try {
        report.items[i] = grade_one(items[i], answers[i], grader, config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.parallelism, 1)),
                                             items.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (const auto& r : report.items) {
    switch (r.verdict) {
      case Verdict::kTrue: ++report.correct; break;
      case Verdict::kFalse: ++report.incorrect; break;
      case Verdict::kUnparsable: ++report.unparsable; break;
    }
  }
  report.total = report.items.size();
  report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.total);
  return report;
}

std::vector<EvalItem> load_benchmark(const std::filesystem::path& path) {
  std::vector<EvalItem> out;
  read_jsonl(path, [&](const json& r, std::size_t) {
    out.push_back(EvalItem{r.at("question").get<std::string>(), r.at("ground_truth").get<std::string>(),
                           eval_category_from_string(r.value("category", std::string{"general"}))});
  });
  return out;
}

std::vector<std::string> load_answers(const std::filesystem::path& path) {
  std::vector<std::string> out;
  read_jsonl(path, [&](const json& r, std::size_t) {
    out.push_back(r.is_string() ? r.get<std::string>() : r.at("answer").get<std::string>());
  });
  return out;
}

json summary_json(const EvalReport& report) {
  return json{{"type", "summary"},
              {"total", report.total},
              {"correct", report.correct},
              {"incorrect", report.incorrect},
              {"unparsable", report.unparsable},
              {"accuracy", report.accuracy}};
}

void write_eval_report(const std::filesystem::path& path, std::span<const EvalItem> items,
                       const EvalReport& report) {
  std::vector<json> lines;
  for (std::size_t i = 0; i < report.items.size(); ++i) {
    const auto& r = report.items[i];
    json line{{"type", "verdict"},
              {"index", i},
              {"category", to_string(items[i].category)},
              {"verdict", to_string(r.verdict)},
              {"grader_output", r.grader_output}};
    if (!r.error.empty()) line["error"] = r.error;
    lines.push_back(std::move(line));
  }
  lines.push_back(summary_json(report));
  write_jsonl(path, lines);
}

}  // namespace mae
