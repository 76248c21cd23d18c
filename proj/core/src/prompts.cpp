#include "mae/prompts.hpp"

#include <algorithm>
#include <stdexcept>

#include "mae/prompt_texts.hpp"

namespace mae {

std::string_view to_string(PromptVariant variant) {
  switch (variant) {
    case PromptVariant::kProposeNoRef: return "propose_no_ref";
    case PromptVariant::kProposeWithRef: return "propose_with_ref";
    case PromptVariant::kSolve: return "solve";
    case PromptVariant::kJudgeAnswer: return "judge_answer";
    case PromptVariant::kJudgeQuestion: return "judge_question";
  }
  return "unknown";
}

PromptVariant prompt_variant_from_string(std::string_view name) {
  for (auto v : {PromptVariant::kProposeNoRef, PromptVariant::kProposeWithRef, PromptVariant::kSolve,
                 PromptVariant::kJudgeAnswer, PromptVariant::kJudgeQuestion}) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown prompt variant '" + std::string(name) + "'");
}

Role role_of(PromptVariant variant) {
  switch (variant) {
    case PromptVariant::kProposeNoRef:
    case PromptVariant::kProposeWithRef: return Role::kProposer;
    case PromptVariant::kSolve: return Role::kSolver;
    case PromptVariant::kJudgeAnswer:
    case PromptVariant::kJudgeQuestion: return Role::kJudge;
  }
  return Role::kJudge;
}

std::vector<std::string> required_placeholders(PromptVariant variant) {
  switch (variant) {
    case PromptVariant::kProposeNoRef: return {};
    case PromptVariant::kProposeWithRef: return {"reference"};
    case PromptVariant::kSolve: return {"question"};
    case PromptVariant::kJudgeAnswer: return {"question", "answer"};
    case PromptVariant::kJudgeQuestion: return {"question"};
  }
  return {};
}

namespace {

std::size_t count_occurrences(std::string_view body, std::string_view token) {
  std::size_t n = 0;
  for (auto pos = body.find(token); pos != std::string_view::npos; pos = body.find(token, pos + 1)) ++n;
  return n;
}

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

}  // namespace

void validate_template(const PromptTemplate& tmpl) {
  for (const auto& name : required_placeholders(tmpl.variant)) {
    const auto n = count_occurrences(tmpl.body, "{" + name + "}");
    if (n != 1) {
      throw std::invalid_argument("template " + std::string(to_string(tmpl.variant)) +
                                  " must contain {" + name + "} exactly once (found " +
                                  std::to_string(n) + ")");
    }
  }
}

PromptTemplate default_template(PromptVariant variant) {
  namespace t = prompt_texts;
  PromptTemplate tmpl;
  tmpl.variant = variant;
  tmpl.role = role_of(variant);
  switch (variant) {
    case PromptVariant::kProposeNoRef:
      tmpl.body = std::string(t::kProposeNoReferenceInstructions);
      break;
    case PromptVariant::kProposeWithRef:
      tmpl.body = std::string(t::kProposeWithReferenceInstructions) +
                  "\n\n### Reference Task:\n{reference}\n";
      break;
    case PromptVariant::kSolve:
      tmpl.body = std::string(t::kSolverInstructions) + "\n\n### Task:\n{question}\n";
      break;
    case PromptVariant::kJudgeAnswer:
      tmpl.body = std::string(t::kJudgeAnswerPrompt);
      break;
    case PromptVariant::kJudgeQuestion:
      tmpl.body = std::string(t::kJudgeQuestionPrompt);
      break;
  }
  validate_template(tmpl);
  return tmpl;
}

std::string substitute(std::string_view body, const PromptBindings& bindings,
                       const std::vector<std::string>& placeholders) {
  std::string out;
  out.reserve(body.size() + 256);
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      std::size_t j = i + 1;
      while (j < body.size() && is_name_char(body[j])) ++j;
      if (j < body.size() && body[j] == '}' && j > i + 1) {
        const auto name = body.substr(i + 1, j - i - 1);
        if (auto it = bindings.find(name); it != bindings.end()) {
          out += it->second;
          i = j + 1;
          continue;
        }
        if (std::find(placeholders.begin(), placeholders.end(), name) != placeholders.end()) {
          throw std::invalid_argument("unbound placeholder {" + std::string(name) + "}");
        }
      }
    }
    out.push_back(body[i++]);
  }
  return out;
}

std::string build_prompt(const PromptTemplate& tmpl, const PromptBindings& bindings) {
  return substitute(tmpl.body, bindings, {"question", "answer", "reference"});
}

PromptSet::PromptSet() {
  for (auto v : {PromptVariant::kProposeNoRef, PromptVariant::kProposeWithRef, PromptVariant::kSolve,
                 PromptVariant::kJudgeAnswer, PromptVariant::kJudgeQuestion}) {
    templates_.emplace(v, default_template(v));
  }
}

void PromptSet::set(PromptVariant variant, std::string body) {
  PromptTemplate tmpl{role_of(variant), variant, std::move(body)};
  validate_template(tmpl);
  templates_[variant] = std::move(tmpl);
}

}  // namespace mae
