#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "mae/config.hpp"
#include "mae/evalharness.hpp"
#include "mae/jsonl.hpp"
#include "mae/scripted_backend.hpp"
#include "support.hpp"

using namespace mae;
using mae::testing::TempDir;

namespace {

std::filesystem::path fixture(const std::string& name) { return mae::testing::fixture_dir() / "eval20" / name; }

std::unique_ptr<ScriptedBackend> grader_with(const std::string& response) {
  return ScriptedBackend::from_json(json{{"rules", {{{"role", "judge"}, {"response", response}}}}});
}

GraderConfig fixture_grader_config() {
  json doc;
  std::ifstream(fixture("config.json")) >> doc;
  return GraderConfig::from_json(doc.at("grader"));
}

std::shared_ptr<Backend> fixture_grader() {
  json doc;
  std::ifstream(fixture("config.json")) >> doc;
  return make_backend(doc.at("grader").at("backend"));
}

}  // namespace

TEST(GraderConfig, Defaults) {
  const GraderConfig g;
  EXPECT_EQ(g.model, "nvidia/llama-3.1-nemotron-70b-instruct");
  EXPECT_EQ(g.temperature, 1.0);
  EXPECT_EQ(g.top_p, 0.95);
  EXPECT_EQ(g.max_tokens, 1000);
  EXPECT_EQ(g.prompts.size(), 4u);
  for (const auto& [cat, body] : g.prompts) {
    for (const std::string p : {"{question}", "{ground_truth}", "{model_answer}"}) {
      EXPECT_NE(body.find(p), std::string::npos) << to_string(cat) << " " << p;
    }
  }
  const auto custom = GraderConfig::from_json(json{{"prompts", {{"math", "Q {question} G {ground_truth} M {model_answer}"}}}});
  EXPECT_EQ(custom.prompts.at(EvalCategory::kMath), "Q {question} G {ground_truth} M {model_answer}");
  EXPECT_THROW(GraderConfig::from_json(json{{"prompts", {{"poetry", "x"}}}}), std::invalid_argument);
}

TEST(GradeOne, ParsesVerdicts) {
  const EvalItem item{"What is 2+2?", "4", EvalCategory::kMath};
  const GraderConfig config;
  EXPECT_EQ(grade_one(item, "<answer>4</answer>", *grader_with("ok <answer>TRUE</answer>"), config).verdict,
            Verdict::kTrue);
  EXPECT_EQ(grade_one(item, "5", *grader_with("no tags here"), config).verdict, Verdict::kUnparsable);
  const EvalItem mc{"Pick one", "B", EvalCategory::kMultipleChoice};
  EXPECT_EQ(grade_one(mc, "A", *grader_with("<answer>FALSE</answer>"), config).verdict, Verdict::kFalse);
}

TEST(GradeOne, BindsCategoryPromptAndExtractedAnswer) {
  auto grader = ScriptedBackend::from_json(json{{"rules", {
      {{"contains", "Ground Truth Answer: 4\n\nModel's Answer: 4\n"}, {"response", "<answer>TRUE</answer>"}},
      {{"response", "<answer>FALSE</answer>"}}}}});
  const GraderConfig config;
  const EvalItem item{"What is 2+2?", "4", EvalCategory::kMath};
  EXPECT_EQ(grade_one(item, "<think>2+2</think><answer> 4 </answer>", *grader, config).verdict, Verdict::kTrue);
  EXPECT_EQ(graded_answer_text("plain text"), "plain text");
  EXPECT_EQ(graded_answer_text("<answer>a</answer><answer>b</answer>"), "a");
}

TEST(GradeOne, TransportFailureIsUnparsableWithNote) {
  auto grader = ScriptedBackend::from_json(json{{"rules", {{{"failure", "transport"}}}}});
  const auto r = grade_one({"q", "a", EvalCategory::kGeneral}, "a", *grader, GraderConfig{});
  EXPECT_EQ(r.verdict, Verdict::kUnparsable);
  EXPECT_FALSE(r.error.empty());
  auto fatal = ScriptedBackend::from_json(json{{"rules", {{{"failure", "fatal"}}}}});
  EXPECT_THROW(grade_one({"q", "a", EvalCategory::kGeneral}, "a", *fatal, GraderConfig{}), BackendError);
}

TEST(EvaluateSet, AggregatesAndValidates) {
  auto grader = ScriptedBackend::from_json(json{{"rules", {
      {{"contains", "Model's Answer: wrong"}, {"response", "<answer>FALSE</answer>"}},
      {{"response", "<answer>TRUE</answer>"}}}}});
  std::vector<EvalItem> items(4, EvalItem{"q", "a", EvalCategory::kGeneral});
  const std::vector<std::string> answers = {"a", "a", "wrong", "a"};
  const auto r = evaluate_set(items, answers, *grader, GraderConfig{});
  EXPECT_EQ(r.total, 4u);
  EXPECT_EQ(r.correct, 3u);
  EXPECT_EQ(r.unparsable, 0u);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.75);

  EXPECT_THROW(evaluate_set({}, {}, *grader, GraderConfig{}), std::invalid_argument);
  const std::vector<std::string> short_answers = {"a"};
  const auto calls_before = grader->calls(Role::kJudge);
  EXPECT_THROW(evaluate_set(items, short_answers, *grader, GraderConfig{}), std::invalid_argument);
  EXPECT_EQ(grader->calls(Role::kJudge), calls_before);
}

TEST(EvaluateSet, FixtureMatchesExpectedRecords) {
  TempDir dir;
  const auto items = load_benchmark(fixture("benchmark.jsonl"));
  const auto answers = load_answers(fixture("answers.jsonl"));
  ASSERT_EQ(items.size(), 20u);
  auto grader = fixture_grader();
  const auto report = evaluate_set(items, answers, *grader, fixture_grader_config());
  EXPECT_EQ(report.total, report.correct + report.incorrect + report.unparsable);
  write_eval_report(dir / "report.jsonl", items, report);
  EXPECT_EQ(read_file(dir / "report.jsonl"), [&] {
    std::vector<json> expected;
    read_jsonl(fixture("expected.jsonl"), [&](const json& r, std::size_t) { expected.push_back(r); });
    write_jsonl(dir / "expected.jsonl", expected);
    return read_file(dir / "expected.jsonl");
  }());
}

TEST(EvaluateSet, AccuracyIsOrderInvariantAndReproducible) {
  auto items = load_benchmark(fixture("benchmark.jsonl"));
  auto answers = load_answers(fixture("answers.jsonl"));
  auto grader = fixture_grader();
  const auto config = fixture_grader_config();
  const auto a = evaluate_set(items, answers, *grader, config);
  const auto again = evaluate_set(items, answers, *grader, config);
  EXPECT_EQ(summary_json(a), summary_json(again));
  std::reverse(items.begin(), items.end());
  std::reverse(answers.begin(), answers.end());
  const auto reversed = evaluate_set(items, answers, *grader, config);
  EXPECT_EQ(reversed.accuracy, a.accuracy);
  EXPECT_EQ(reversed.unparsable, a.unparsable);
}

TEST(EvalFiles, LoadersAcceptBothAnswerForms) {
  TempDir dir;
  write_jsonl(dir / "answers.jsonl", {json("bare"), json{{"answer", "wrapped"}}});
  EXPECT_EQ(load_answers(dir / "answers.jsonl"), (std::vector<std::string>{"bare", "wrapped"}));
  write_jsonl(dir / "bench.jsonl", {json{{"question", "q"}, {"ground_truth", "g"}}});
  EXPECT_EQ(load_benchmark(dir / "bench.jsonl").at(0).category, EvalCategory::kGeneral);
  write_jsonl(dir / "bad.jsonl", {json{{"question", "q"}, {"ground_truth", "g"}, {"category", "art"}}});
  EXPECT_THROW(load_benchmark(dir / "bad.jsonl"), RecordError);
}
