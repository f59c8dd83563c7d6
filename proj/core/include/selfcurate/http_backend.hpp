#pragma once

#include <memory>
#include <string>

#include "selfcurate/backend.hpp"

namespace selfcurate {

struct HttpBackendOptions {
  std::string endpoint;     // e.g. "http://localhost:8000" or ".../v1"
  std::string model;
  std::string api_key;      // empty = no Authorization header
  int connect_timeout_s = 10;
  int request_timeout_s = 600;
  bool send_seed = true;    // forward seed_hint as the request "seed"
};

/// OpenAI-compatible chat-completions client. Each call sends the prompt as a
/// single user message; 429 and 5xx map to retryable errors, other non-2xx to
/// non-retryable ones, and unparseable bodies to MalformedResponseError.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  ~HttpBackend() override;

  InferenceResponse complete(const InferenceRequest& request) override;
  std::string name() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace selfcurate
