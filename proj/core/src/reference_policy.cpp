#include "mae/reference_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mae/random.hpp"

namespace mae {

std::size_t ActionTable::index_of(std::string_view action) const {
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] == action) return i;
  }
  throw std::invalid_argument("unknown action '" + std::string(action) + "'");
}

std::string ActionTable::render(std::size_t action) const {
  static constexpr std::string_view kToken = "{action}";
  std::string out = render_template;
  const auto pos = out.find(kToken);
  if (pos != std::string::npos) out.replace(pos, kToken.size(), actions.at(action));
  return out;
}

void ReferencePolicyParams::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(entropy_coefficient >= 0.0)) throw std::invalid_argument("entropy_coefficient must be >= 0");
  for (const auto& [role, t] : tables) {
    if (t.actions.empty()) throw std::invalid_argument("empty action vocabulary");
    if (t.logits.size() != t.actions.size()) throw std::invalid_argument("logit/action size mismatch");
    for (double z : t.logits) {
      if (!std::isfinite(z)) throw std::invalid_argument("non-finite logit");
    }
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
      for (std::size_t k = i + 1; k < t.actions.size(); ++k) {
        if (t.render(i) == t.render(k)) throw std::invalid_argument("actions render identically");
      }
    }
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    z += p[i];
  }
  for (double& x : p) x /= z;
  return p;
}

namespace {

double log_sum_exp(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - top);
  return top + std::log(z);
}

const ActionTable& table_for(const ReferencePolicyParams& params, Role role) {
  auto it = params.tables.find(role);
  if (it == params.tables.end()) {
    throw std::invalid_argument("reference policy has no table for role " +
                                std::string(to_string(role)));
  }
  return it->second;
}

std::size_t sample_action(const ActionTable& t, double temperature, double top_p, Rng& rng) {
  const std::size_t n = t.logits.size();
  if (temperature == 0.0) {
    return static_cast<std::size_t>(std::max_element(t.logits.begin(), t.logits.end()) -
                                    t.logits.begin());
  }
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = t.logits[i] / temperature;
  auto p = softmax(scaled);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (top_p < 1.0) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
    double mass = 0.0;
    std::size_t keep = 0;
    while (keep < n && mass < top_p) mass += p[order[keep++]];
    order.resize(keep);
  }
  double total = 0.0;
  for (auto i : order) total += p[i];
  double u = rng.uniform01() * total;
  for (auto i : order) {
    u -= p[i];
    if (u < 0.0) return i;
  }
  return order.back();
}

ActionTable table_from_json(const json& j) {
  ActionTable t;
  t.actions = j.at("actions").get<std::vector<std::string>>();
  t.logits = j.contains("logits") ? j.at("logits").get<std::vector<double>>()
                                  : std::vector<double>(t.actions.size(), 0.0);
  t.render_template = j.value("template", std::string{"{action}"});
  return t;
}

}  // namespace

LogProbGrad reference_logprob_and_grad(const ReferencePolicyParams& params, Role role,
                                       std::string_view action) {
  const auto& t = table_for(params, role);
  const std::size_t a = t.index_of(action);
  const double lse = log_sum_exp(t.logits);
  LogProbGrad out;
  out.logprob = t.logits[a] - lse;
  out.grad.resize(t.logits.size());
  for (std::size_t i = 0; i < t.logits.size(); ++i) {
    out.grad[i] = (i == a ? 1.0 : 0.0) - std::exp(t.logits[i] - lse);
  }
  return out;
}

ReferencePolicyBackend::ReferencePolicyBackend(ReferencePolicyParams params)
    : params_(std::move(params)) {
  params_.validate();
}

std::unique_ptr<ReferencePolicyBackend> ReferencePolicyBackend::from_json(const json& config) {
  ReferencePolicyParams p;
  p.learning_rate = config.value("learning_rate", p.learning_rate);
  p.entropy_coefficient = config.value("entropy_coefficient", p.entropy_coefficient);
  for (const auto& [name, table] : config.at("roles").items()) {
    p.tables[role_from_string(name)] = table_from_json(table);
  }
  return std::make_unique<ReferencePolicyBackend>(std::move(p));
}

std::string ReferencePolicyBackend::generate(const GenerationRequest& request) {
  validate_request(request);
  Rng rng(request.rng_seed.value_or(0));
  std::lock_guard lock(mutex_);
  const auto& t = table_for(params_, request.role);
  return t.render(sample_action(t, request.temperature, request.top_p, rng));
}

UpdateReport ReferencePolicyBackend::apply_update(const UpdateBatch& batch) {
  auto report = summarize_update(batch);
  std::lock_guard lock(mutex_);

  std::map<Role, std::vector<double>> step;
  for (const auto& item : batch.items) {
    auto it = params_.tables.find(item.role);
    if (it == params_.tables.end()) {
      ++skipped_;
      continue;
    }
    const auto& t = it->second;
    std::size_t action = t.actions.size();
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
      if (t.render(i) == item.completion) action = i;
    }
    if (action == t.actions.size()) {
      ++skipped_;
      continue;
    }
    const auto g = reference_logprob_and_grad(params_, item.role, t.actions[action]).grad;
    auto& acc = step.try_emplace(item.role, t.logits.size(), 0.0).first->second;
    for (std::size_t i = 0; i < g.size(); ++i) acc[i] += item.advantage * g[i];
  }

  if (params_.entropy_coefficient > 0.0) {
    // dH/dz_k = -p_k (log p_k + H)
    for (auto& [role, acc] : step) {
      const auto p = softmax(params_.tables.at(role).logits);
      double h = 0.0;
      for (double pk : p) h -= pk > 0.0 ? pk * std::log(pk) : 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double lp = p[k] > 0.0 ? std::log(p[k]) : 0.0;
        acc[k] += params_.entropy_coefficient * (-p[k] * (lp + h));
      }
    }
  }

  for (const auto& [role, acc] : step) {
    auto& logits = params_.tables.at(role).logits;
    for (std::size_t i = 0; i < logits.size(); ++i) logits[i] += params_.learning_rate * acc[i];
  }
  report.applied = true;
  return report;
}

json ReferencePolicyBackend::save_state() const {
  std::lock_guard lock(mutex_);
  json roles = json::object();
  for (const auto& [role, t] : params_.tables) roles[std::string(to_string(role))] = t.logits;
  return json{{"logits", roles}};
}

void ReferencePolicyBackend::load_state(const json& state) {
  std::lock_guard lock(mutex_);
  auto next = params_;
  for (const auto& [name, logits] : state.at("logits").items()) {
    auto& t = next.tables.at(role_from_string(name));
    t.logits = logits.get<std::vector<double>>();
  }
  next.validate();
  params_ = std::move(next);
}

ReferencePolicyParams ReferencePolicyBackend::params() const {
  std::lock_guard lock(mutex_);
  return params_;
}

std::vector<double> ReferencePolicyBackend::probabilities(Role role) const {
  std::lock_guard lock(mutex_);
  return softmax(table_for(params_, role).logits);
}

double ReferencePolicyBackend::expected_value(Role role, std::span<const double> action_values) const {
  const auto p = probabilities(role);
  if (action_values.size() != p.size()) throw std::invalid_argument("action value size mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) v += p[i] * action_values[i];
  return v;
}

}  // namespace mae
