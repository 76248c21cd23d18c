#include "mae/http_backend.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace mae {

namespace {

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  if (options_.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  const auto scheme_end = options_.base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("base_url needs a scheme: " + options_.base_url);
  }
  const auto path_start = options_.base_url.find('/', scheme_end + 3);
  host_ = options_.base_url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "" : options_.base_url.substr(path_start);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
}

HttpBackendOptions HttpBackend::options_from_json(const json& config) {
  HttpBackendOptions o;
  o.base_url = config.value("base_url", o.base_url);
  o.model = config.value("model", o.model);
  o.api_key = config.value("api_key", o.api_key);
  o.max_attempts = config.value("max_attempts", o.max_attempts);
  o.initial_backoff = std::chrono::milliseconds(config.value("initial_backoff_ms", 500));
  o.backoff_factor = config.value("backoff_factor", o.backoff_factor);
  o.timeout = std::chrono::seconds(config.value("timeout_s", 300));
  return o;
}

json HttpBackend::request_body(const GenerationRequest& request) const {
  json body{{"model", options_.model},
            {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
            {"temperature", request.temperature},
            {"top_p", request.top_p},
            {"max_tokens", request.max_new_units}};
  if (request.rng_seed) body["seed"] = *request.rng_seed;
  return body;
}

std::string HttpBackend::completion_text(const json& response) {
  const auto choices = response.find("choices");
  if (choices == response.end() || !choices->is_array() || choices->empty()) {
    throw BackendError("response has no choices");
  }
  const auto& first = choices->front();
  if (first.contains("message") && first["message"].contains("content") &&
      first["message"]["content"].is_string()) {
    return first["message"]["content"].get<std::string>();
  }
  if (first.contains("text") && first["text"].is_string()) return first["text"].get<std::string>();
  throw BackendError("first choice carries no text");
}

std::string HttpBackend::generate(const GenerationRequest& request) {
  validate_request(request);
  const std::string body = request_body(request).dump();

  httplib::Client client(host_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  auto delay = options_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status >= 200 && res->status < 300) {
      try {
        return completion_text(json::parse(res->body));
      } catch (const std::exception& e) {
        last_error = std::string("malformed response: ") + e.what();
      }
    } else if (retryable_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      throw BackendError("HTTP " + std::to_string(res->status) + " from " + host_ + path_ + ": " +
                         res->body.substr(0, 200));
    }
    if (attempt < options_.max_attempts) {
      spdlog::warn("generate attempt {}/{} failed ({}); retrying in {} ms", attempt,
                   options_.max_attempts, last_error, delay.count());
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(
          static_cast<long long>(std::llround(static_cast<double>(delay.count()) * options_.backoff_factor)));
    }
  }
  throw TransportError(last_error, options_.max_attempts);
}

UpdateReport HttpBackend::apply_update(const UpdateBatch& batch) {
  auto report = summarize_update(batch);
  report.applied = false;
  return report;
}

}  // namespace mae
