#pragma once

#include <chrono>
#include <string>

#include "mae/backend.hpp"

namespace mae {

struct HttpBackendOptions {
  /// Endpoint root, e.g. "http://localhost:8000/v1"; requests go to
  /// base_url + "/chat/completions".
  std::string base_url = "http://localhost:8000/v1";
  std::string model = "Qwen/Qwen2.5-3B-Instruct";
  std::string api_key;
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_factor = 2.0;
  std::chrono::seconds timeout{300};
};

/// Client for an OpenAI-compatible chat-completion endpoint. Inference only:
/// apply_update() reports counts and applied=false.
///
/// Connection errors, HTTP 429 and 5xx, and malformed bodies are retried
/// with exponential backoff; once attempts run out a TransportError is
/// thrown. Any other non-2xx status raises BackendError immediately.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  /// Reads base_url, model, api_key, max_attempts, initial_backoff_ms,
  /// backoff_factor, timeout_s. api_key must already be expanded.
  static HttpBackendOptions options_from_json(const json& config);

  std::string name() const override { return "http"; }
  std::string generate(const GenerationRequest& request) override;
  UpdateReport apply_update(const UpdateBatch& batch) override;

  const HttpBackendOptions& options() const { return options_; }

  /// Request body sent for a generation request.
  json request_body(const GenerationRequest& request) const;
  /// Text of the first choice; throws BackendError if absent.
  static std::string completion_text(const json& response);

 private:
  HttpBackendOptions options_;
  std::string host_;
  std::string path_;
};

}  // namespace mae
