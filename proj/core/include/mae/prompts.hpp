#pragma once

#include <map>
#include <string>
#include <string_view>

#include "mae/domain.hpp"

namespace mae {

enum class PromptVariant { kProposeNoRef, kProposeWithRef, kSolve, kJudgeAnswer, kJudgeQuestion };

std::string_view to_string(PromptVariant variant);
PromptVariant prompt_variant_from_string(std::string_view name);
Role role_of(PromptVariant variant);

/// Role instructions with named placeholders ({question}, {answer},
/// {reference}). Each placeholder the variant needs appears exactly once.
struct PromptTemplate {
  Role role = Role::kProposer;
  PromptVariant variant = PromptVariant::kProposeNoRef;
  std::string body;
};

/// Placeholders a variant must contain.
std::vector<std::string> required_placeholders(PromptVariant variant);

/// Throws std::invalid_argument unless each required placeholder occurs
/// exactly once in the body.
void validate_template(const PromptTemplate& tmpl);

PromptTemplate default_template(PromptVariant variant);

using PromptBindings = std::map<std::string, std::string, std::less<>>;

/// Single-pass substitution of `{name}` tokens in `body`: substituted text is
/// never rescanned. Tokens whose name is not a bound key and not in
/// `placeholders` are left untouched. Throws std::invalid_argument naming
/// the first placeholder without a binding.
std::string substitute(std::string_view body, const PromptBindings& bindings,
                       const std::vector<std::string>& placeholders);

std::string build_prompt(const PromptTemplate& tmpl, const PromptBindings& bindings);

/// The five role templates used by the orchestrator.
class PromptSet {
 public:
  PromptSet();
  const PromptTemplate& get(PromptVariant variant) const { return templates_.at(variant); }
  /// Replaces one template body after validating it.
  void set(PromptVariant variant, std::string body);

 private:
  std::map<PromptVariant, PromptTemplate> templates_;
};

}  // namespace mae
