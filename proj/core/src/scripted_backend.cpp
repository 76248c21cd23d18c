#include "mae/scripted_backend.hpp"

namespace mae {

namespace {

std::string expand_seed(std::string text, std::uint64_t seed) {
  static constexpr std::string_view kToken = "{seed}";
  const std::string value = std::to_string(seed);
  std::size_t pos = 0;
  while ((pos = text.find(kToken, pos)) != std::string::npos) {
    text.replace(pos, kToken.size(), value);
    pos += value.size();
  }
  return text;
}

}  // namespace

ScriptedBackend::ScriptedBackend(std::vector<ScriptRule> rules) : rules_(std::move(rules)) {
  for (const auto& r : rules_) {
    if (r.failure == ScriptRule::Failure::kNone && r.responses.empty()) {
      throw std::invalid_argument("scripted rule has no responses");
    }
  }
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_json(const json& config) {
  std::vector<ScriptRule> rules;
  for (const auto& r : config.at("rules")) {
    ScriptRule rule;
    if (r.contains("role")) rule.role = role_from_string(r.at("role").get<std::string>());
    rule.contains = r.value("contains", std::string{});
    if (r.contains("response")) rule.responses.push_back(r.at("response").get<std::string>());
    if (r.contains("responses")) {
      for (const auto& s : r.at("responses")) rule.responses.push_back(s.get<std::string>());
    }
    const auto failure = r.value("failure", std::string{"none"});
    if (failure == "transport") {
      rule.failure = ScriptRule::Failure::kTransport;
    } else if (failure == "fatal") {
      rule.failure = ScriptRule::Failure::kFatal;
    } else if (failure != "none") {
      throw std::invalid_argument("unknown scripted failure '" + failure + "'");
    }
    rules.push_back(std::move(rule));
  }
  return std::make_unique<ScriptedBackend>(std::move(rules));
}

std::string ScriptedBackend::generate(const GenerationRequest& request) {
  validate_request(request);
  calls_[static_cast<std::size_t>(request.role)].fetch_add(1);
  for (const auto& rule : rules_) {
    if (rule.role && *rule.role != request.role) continue;
    if (!rule.contains.empty() && request.prompt.find(rule.contains) == std::string::npos) continue;
    switch (rule.failure) {
      case ScriptRule::Failure::kTransport:
        throw TransportError("scripted transport failure", 1);
      case ScriptRule::Failure::kFatal:
        throw BackendError("scripted fatal failure");
      case ScriptRule::Failure::kNone:
        break;
    }
    const std::uint64_t seed = request.rng_seed.value_or(0);
    const auto& response = rule.responses[seed % rule.responses.size()];
    return expand_seed(response, seed);
  }
  throw BackendError("no scripted response for role " + std::string(to_string(request.role)));
}

UpdateReport ScriptedBackend::apply_update(const UpdateBatch& batch) {
  auto report = summarize_update(batch);
  update_calls_.fetch_add(1);
  report.applied = false;
  return report;
}

std::size_t ScriptedBackend::calls(Role role) const {
  return calls_[static_cast<std::size_t>(role)].load();
}

}  // namespace mae
