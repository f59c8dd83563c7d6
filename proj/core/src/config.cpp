#include "selfcurate/config.hpp"

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "selfcurate/http_backend.hpp"
#include "selfcurate/scripted_backend.hpp"
#include "selfcurate/util.hpp"

namespace selfcurate {

using ojson = nlohmann::ordered_json;

RunConfig config_from_json(const std::string& text, const std::string& origin) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(origin + ": config parse error: " + e.what());
  }
  RunConfig config;
  try {
    if (j.contains("backend")) {
      const ojson& b = j.at("backend");
      config.backend.type = b.value("type", config.backend.type);
      config.backend.endpoint = b.value("endpoint", "");
      config.backend.model = b.value("model", "");
      config.backend.api_key_env = b.value("api_key_env", config.backend.api_key_env);
      config.backend.script_file = b.value("script_file", "");
      config.backend.connect_timeout_s =
          b.value("connect_timeout_s", config.backend.connect_timeout_s);
      config.backend.request_timeout_s =
          b.value("request_timeout_s", config.backend.request_timeout_s);
    }
    config.n = j.value("n", config.n);
    config.v = j.value("v", config.v);
    if (j.contains("verifier")) {
      auto kind = verifier_kind_from_string(j.at("verifier").get<std::string>());
      if (!kind) throw ConfigError(origin + ": field 'verifier': must be uq or simple");
      config.verifier = *kind;
    }
    if (j.contains("policy")) {
      auto policy = selection_policy_from_string(j.at("policy").get<std::string>());
      if (!policy) {
        throw ConfigError(origin + ": field 'policy': must be first_valid or all_valid");
      }
      config.policy = *policy;
    }
    config.short_circuit = j.value("short_circuit", config.short_circuit);
    if (j.contains("solution_field")) {
      std::string field = j.at("solution_field").get<std::string>();
      if (field == "raw") {
        config.solution_field = SolutionField::raw;
      } else if (field == "answer") {
        config.solution_field = SolutionField::answer;
      } else {
        throw ConfigError(origin + ": field 'solution_field': must be raw or answer");
      }
    }
    config.seed_file = j.value("seed_file", "");
    config.output_dir = j.value("output_dir", "");
    config.max_concurrency = j.value("max_concurrency", config.max_concurrency);
    if (j.contains("retry")) {
      const ojson& r = j.at("retry");
      config.retry.max_attempts = r.value("max_attempts", config.retry.max_attempts);
      config.retry.initial_backoff_ms =
          r.value("initial_backoff_ms", config.retry.initial_backoff_ms);
      config.retry.backoff_multiplier =
          r.value("backoff_multiplier", config.retry.backoff_multiplier);
      config.retry.max_backoff_ms = r.value("max_backoff_ms", config.retry.max_backoff_ms);
    }
    if (j.contains("sampling")) {
      const ojson& s = j.at("sampling");
      config.sampling.temperature = s.value("temperature", config.sampling.temperature);
      config.sampling.top_p = s.value("top_p", config.sampling.top_p);
      config.sampling.max_output_tokens =
          s.value("max_output_tokens", config.sampling.max_output_tokens);
    }
    config.template_dir = j.value("template_dir", "");
    if (j.contains("reasoning_markers")) {
      const ojson& m = j.at("reasoning_markers");
      config.markers.open = m.value("open", config.markers.open);
      config.markers.close = m.value("close", config.markers.close);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(origin + ": config field error: " + e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config_from_json(text, path.string());
}

std::string config_to_json(const RunConfig& config) {
  ojson j = {
      {"backend",
       {
           {"type", config.backend.type},
           {"endpoint", config.backend.endpoint},
           {"model", config.backend.model},
           {"api_key_env", config.backend.api_key_env},
           {"script_file", config.backend.script_file},
           {"connect_timeout_s", config.backend.connect_timeout_s},
           {"request_timeout_s", config.backend.request_timeout_s},
       }},
      {"n", config.n},
      {"v", config.v},
      {"verifier", std::string(to_string(config.verifier))},
      {"policy", std::string(to_string(config.policy))},
      {"short_circuit", config.short_circuit},
      {"solution_field", config.solution_field == SolutionField::raw ? "raw" : "answer"},
      {"seed_file", config.seed_file},
      {"output_dir", config.output_dir},
      {"max_concurrency", config.max_concurrency},
      {"retry",
       {
           {"max_attempts", config.retry.max_attempts},
           {"initial_backoff_ms", config.retry.initial_backoff_ms},
           {"backoff_multiplier", config.retry.backoff_multiplier},
           {"max_backoff_ms", config.retry.max_backoff_ms},
       }},
      {"sampling",
       {
           {"temperature", config.sampling.temperature},
           {"top_p", config.sampling.top_p},
           {"max_output_tokens", config.sampling.max_output_tokens},
       }},
      {"template_dir", config.template_dir},
      {"reasoning_markers",
       {
           {"open", config.markers.open},
           {"close", config.markers.close},
       }},
  };
  return j.dump(2) + "\n";
}

std::vector<std::string> validate_config(const RunConfig& config, bool need_seed_file,
                                         bool need_output_dir) {
  std::vector<std::string> errors;
  auto fail = [&](const std::string& field, const std::string& why) {
    errors.push_back("field '" + field + "': " + why);
  };

  if (config.n < 1) fail("n", "must be >= 1");
  if (config.v < 1) fail("v", "must be >= 1");
  if (config.sampling.temperature < 0) fail("sampling.temperature", "must be >= 0");
  if (config.sampling.top_p <= 0 || config.sampling.top_p > 1) {
    fail("sampling.top_p", "must be in (0, 1]");
  }
  if (config.sampling.max_output_tokens < 1) {
    fail("sampling.max_output_tokens", "must be >= 1");
  }
  if (config.max_concurrency < 1) fail("max_concurrency", "must be >= 1");
  if (config.retry.max_attempts < 1) fail("retry.max_attempts", "must be >= 1");
  if (config.retry.initial_backoff_ms < 0) fail("retry.initial_backoff_ms", "must be >= 0");
  if (config.retry.max_backoff_ms < 0) fail("retry.max_backoff_ms", "must be >= 0");
  if (config.retry.backoff_multiplier < 1.0) {
    fail("retry.backoff_multiplier", "must be >= 1");
  }

  if (config.backend.type == "http") {
    if (config.backend.endpoint.empty()) fail("backend.endpoint", "required for http backend");
    if (config.backend.model.empty()) fail("backend.model", "required for http backend");
  } else if (config.backend.type == "mock") {
    if (config.backend.script_file.empty()) {
      fail("backend.script_file", "required for mock backend");
    }
  } else {
    fail("backend.type", "must be http or mock");
  }

  if (need_seed_file && config.seed_file.empty()) fail("seed_file", "required");
  if (need_output_dir && config.output_dir.empty()) fail("output_dir", "required");

  if (config.markers.close.empty() && !config.markers.open.empty()) {
    fail("reasoning_markers.close", "must be set when 'open' is set");
  }
  if (!config.template_dir.empty() && !std::filesystem::is_directory(config.template_dir)) {
    fail("template_dir", "not a directory: " + config.template_dir);
  }
  return errors;
}

std::unique_ptr<Backend> make_backend(const RunConfig& config) {
  if (config.backend.type == "mock") {
    return ScriptedBackend::from_file(config.backend.script_file);
  }
  HttpBackendOptions options;
  options.endpoint = config.backend.endpoint;
  options.model = config.backend.model;
  options.connect_timeout_s = config.backend.connect_timeout_s;
  options.request_timeout_s = config.backend.request_timeout_s;
  if (!config.backend.api_key_env.empty()) {
    if (const char* key = std::getenv(config.backend.api_key_env.c_str())) {
      options.api_key = key;
    }
  }
  return std::make_unique<HttpBackend>(std::move(options));
}

}  // namespace selfcurate
