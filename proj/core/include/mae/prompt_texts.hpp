#pragma once

#include <string_view>

// Verbatim instruction and rubric texts for the three roles and the
// evaluation grader.
namespace mae::prompt_texts {

extern const std::string_view kSolverInstructions;
extern const std::string_view kProposeNoReferenceInstructions;
extern const std::string_view kProposeWithReferenceInstructions;
extern const std::string_view kJudgeAnswerPrompt;
extern const std::string_view kJudgeQuestionPrompt;

extern const std::string_view kMathGraderPrompt;
extern const std::string_view kMultipleChoiceGraderPrompt;
extern const std::string_view kTruthfulnessGraderPrompt;
extern const std::string_view kGeneralGraderPrompt;

}  // namespace mae::prompt_texts
