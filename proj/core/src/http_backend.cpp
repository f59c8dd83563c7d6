#include "selfcurate/http_backend.hpp"

#ifdef SELFCURATE_HTTPS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace selfcurate {

using json = nlohmann::json;

namespace {

// Splits "http://host:port/v1" into scheme://host:port and "/v1".
struct EndpointParts {
  std::string origin;
  std::string base_path;
};

EndpointParts split_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("backend.endpoint: expected http(s)://host[:port][/path], got '" +
                      endpoint + "'");
  }
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {endpoint, ""};
  }
  std::string path = endpoint.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {endpoint.substr(0, path_start), path};
}

}  // namespace

struct HttpBackend::Impl {
  HttpBackendOptions options;
  EndpointParts parts;
  httplib::Client client;

  explicit Impl(HttpBackendOptions opts)
      : options(std::move(opts)), parts(split_endpoint(options.endpoint)), client(parts.origin) {
    client.set_connection_timeout(options.connect_timeout_s, 0);
    client.set_read_timeout(options.request_timeout_s, 0);
    client.set_write_timeout(options.request_timeout_s, 0);
  }
};

HttpBackend::HttpBackend(HttpBackendOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::name() const { return "http:" + impl_->options.endpoint; }

InferenceResponse HttpBackend::complete(const InferenceRequest& request) {
  json body = {
      {"model", impl_->options.model},
      {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.params.temperature},
      {"top_p", request.params.top_p},
      {"max_tokens", request.params.max_output_tokens},
  };
  if (impl_->options.send_seed) {
    body["seed"] = request.seed_hint;
  }

  httplib::Headers headers = {{"Content-Type", "application/json"}};
  if (!impl_->options.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + impl_->options.api_key);
  }

  auto result = impl_->client.Post(impl_->parts.base_path + "/chat/completions", headers,
                                   body.dump(), "application/json");
  if (!result) {
    throw TransportError("transport failure for " + request.unit_key.str() + ": " +
                         httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw HttpStatusError(result->status,
                          "HTTP " + std::to_string(result->status) + " for " +
                              request.unit_key.str() + ": " + result->body.substr(0, 200));
  }

  json response;
  try {
    response = json::parse(result->body);
  } catch (const json::exception& e) {
    throw MalformedResponseError("unparseable response body for " + request.unit_key.str() +
                                 ": " + e.what());
  }
  try {
    const json& choice = response.at("choices").at(0);
    InferenceResponse out;
    out.text = choice.at("message").at("content").get<std::string>();
    std::string finish = choice.value("finish_reason", "stop");
    if (finish == "stop") {
      out.finish_reason = FinishReason::stop;
    } else if (finish == "length") {
      out.finish_reason = FinishReason::length;
    } else {
      out.finish_reason = FinishReason::error;
    }
    if (response.contains("usage")) {
      const json& usage = response.at("usage");
      out.usage.prompt_tokens = usage.value("prompt_tokens", 0);
      out.usage.completion_tokens = usage.value("completion_tokens", 0);
    }
    return out;
  } catch (const json::exception& e) {
    throw MalformedResponseError("response missing expected fields for " +
                                 request.unit_key.str() + ": " + e.what());
  }
}

}  // namespace selfcurate
