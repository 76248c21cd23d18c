#include <cstdlib>

#include "mae/config.hpp"
#include "mae/http_backend.hpp"
#include "mae/reference_policy.hpp"
#include "mae/scripted_backend.hpp"

namespace mae {

json default_backend_config(const std::string& kind) {
  if (kind == "scripted") {
    return json{
        {"kind", "scripted"},
        {"rules",
         json::array({
             {{"role", "proposer"},
              {"response", "<question>\nA train covers {seed} km in 2 hours. What is its average speed in km/h?\n</question>"}},
             {{"role", "solver"}, {"response", "<think>distance over time</think>\n<answer>half the distance</answer>"}},
             {{"role", "judge"}, {"contains", "Generated Solution:"}, {"response", "<think>fine</think>\n<score>6</score>"}},
             {{"role", "judge"}, {"response", "<think>clear and solvable</think>\n<score>8</score>"}},
         })}};
  }
  if (kind == "reference") {
    return json{
        {"kind", "reference"},
        {"learning_rate", 0.05},
        {"roles",
         {{"proposer",
           {{"actions",
             {"What is the smallest prime greater than 90?", "How many edges does a cube have?",
              "What is 17 * 23?", "Name the chemical symbol for sodium."}},
            {"template", "<question>{action}</question>"}}},
          {"solver", {{"actions", {"<answer>97</answer>", "<answer>12</answer>", "<answer>391</answer>", "I am not sure."}}}},
          {"judge",
           {{"actions", {"<score>2</score>", "<score>5</score>", "<score>8</score>", "<score>9</score>", "score: 7"}}}}}}};
  }
  if (kind == "http") {
    return json{{"kind", "http"},
                {"base_url", "http://localhost:8000/v1"},
                {"model", "Qwen/Qwen2.5-3B-Instruct"},
                {"api_key_env", "OPENAI_API_KEY"}};
  }
  throw ConfigError("unknown backend kind '" + kind + "'");
}

std::shared_ptr<Backend> make_backend(const json& section) {
  const auto kind = section.value("kind", std::string{});
  try {
    if (kind == "scripted") return std::shared_ptr<Backend>(ScriptedBackend::from_json(section));
    if (kind == "reference") {
      return std::shared_ptr<Backend>(ReferencePolicyBackend::from_json(section));
    }
    if (kind == "http") {
      json resolved = section;
      if (section.contains("api_key")) {
        resolved["api_key"] = expand_secret(section.at("api_key").get<std::string>());
      } else {
        const auto var = section.value("api_key_env", std::string{"OPENAI_API_KEY"});
        const char* v = std::getenv(var.c_str());
        resolved["api_key"] = v ? std::string(v) : std::string{};
      }
      return std::make_shared<HttpBackend>(HttpBackend::options_from_json(resolved));
    }
    if (kind == "routed") {
      const auto& routes = section.at("routes");
      std::map<std::string, std::shared_ptr<Backend>> shared;
      auto build = [&](const std::string& role) {
        const auto& r = routes.at(role);
        // Routes given as a string refer to a named entry in "backends", so
        // several roles can share one instance.
        if (r.is_string()) {
          const auto name = r.get<std::string>();
          if (!shared.contains(name)) shared[name] = make_backend(section.at("backends").at(name));
          return shared[name];
        }
        return make_backend(r);
      };
      return std::make_shared<RoutedBackend>(build("proposer"), build("solver"), build("judge"));
    }
  } catch (const json::exception& e) {
    throw ConfigError("invalid " + kind + " backend section: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid " + kind + " backend section: " + e.what());
  }
  throw ConfigError("unknown backend kind '" + kind + "'");
}

}  // namespace mae
