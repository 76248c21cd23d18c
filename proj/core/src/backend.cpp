#include "mae/backend.hpp"

#include <algorithm>
#include <cmath>

namespace mae {

UpdateReport summarize_update(const UpdateBatch& batch) {
  if (batch.items.empty()) throw std::invalid_argument("apply_update: empty batch");
  UpdateReport report;
  for (const auto& item : batch.items) {
    if (!std::isfinite(item.advantage)) {
      throw std::invalid_argument("apply_update: non-finite advantage");
    }
    auto& s = report.per_role[item.role];
    ++s.count;
    s.mean_advantage += item.advantage;
  }
  for (auto& [role, s] : report.per_role) s.mean_advantage /= static_cast<double>(s.count);
  return report;
}

void validate_request(const GenerationRequest& request) {
  if (request.prompt.empty()) throw std::invalid_argument("generate: empty prompt");
  if (!(request.temperature >= 0.0)) throw std::invalid_argument("generate: temperature < 0");
  if (!(request.top_p > 0.0 && request.top_p <= 1.0)) {
    throw std::invalid_argument("generate: top_p outside (0,1]");
  }
  if (request.max_new_units <= 0) throw std::invalid_argument("generate: max_new_units <= 0");
}

RoutedBackend::RoutedBackend(std::shared_ptr<Backend> proposer, std::shared_ptr<Backend> solver,
                             std::shared_ptr<Backend> judge) {
  if (!proposer || !solver || !judge) throw std::invalid_argument("RoutedBackend: null route");
  routes_[Role::kProposer] = std::move(proposer);
  routes_[Role::kSolver] = std::move(solver);
  routes_[Role::kJudge] = std::move(judge);
}

std::string RoutedBackend::name() const {
  std::string out = "routed(";
  for (Role r : kAllRoles) {
    if (r != Role::kProposer) out += ",";
    out += std::string(to_string(r)) + "=" + routes_.at(r)->name();
  }
  return out + ")";
}

Backend& RoutedBackend::route(Role role) const { return *routes_.at(role); }

std::vector<std::shared_ptr<Backend>> RoutedBackend::distinct() const {
  std::vector<std::shared_ptr<Backend>> out;
  for (Role r : kAllRoles) {
    const auto& b = routes_.at(r);
    if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  }
  return out;
}

std::string RoutedBackend::generate(const GenerationRequest& request) {
  return route(request.role).generate(request);
}

UpdateReport RoutedBackend::apply_update(const UpdateBatch& batch) {
  UpdateReport report = summarize_update(batch);
  report.applied = false;
  for (const auto& backend : distinct()) {
    UpdateBatch part;
    for (const auto& item : batch.items) {
      if (routes_.at(item.role) == backend) part.items.push_back(item);
    }
    if (part.items.empty()) continue;
    report.applied = backend->apply_update(part).applied || report.applied;
  }
  return report;
}

json RoutedBackend::save_state() const {
  json out = json::array();
  for (const auto& b : distinct()) out.push_back(b->save_state());
  return out;
}

void RoutedBackend::load_state(const json& state) {
  const auto backends = distinct();
  if (!state.is_array() || state.size() != backends.size()) {
    throw BackendError("routed backend state does not match its routes");
  }
  for (std::size_t i = 0; i < backends.size(); ++i) backends[i]->load_state(state[i]);
}

}  // namespace mae
