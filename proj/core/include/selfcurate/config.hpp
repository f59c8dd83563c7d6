#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "selfcurate/backend.hpp"
#include "selfcurate/curation.hpp"
#include "selfcurate/generation.hpp"
#include "selfcurate/types.hpp"

namespace selfcurate {

struct BackendConfig {
  std::string type = "http";  // http | mock
  std::string endpoint;
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  std::string script_file;  // mock backend
  int connect_timeout_s = 10;
  int request_timeout_s = 600;
};

/// Full run configuration. Loaded from a JSON file, overridable per field by
/// CLI flags, and persisted into the run directory.
struct RunConfig {
  BackendConfig backend;
  int n = 1;
  int v = 1;
  VerifierKind verifier = VerifierKind::uq;
  SelectionPolicy policy = SelectionPolicy::first_valid;
  bool short_circuit = true;
  SolutionField solution_field = SolutionField::raw;
  std::string seed_file;
  std::string output_dir;
  int max_concurrency = 4;
  RetryPolicy retry;
  SamplingParams sampling;
  std::string template_dir;  // empty = built-in templates
  ReasoningMarkers markers;
};

RunConfig config_from_json(const std::string& text, const std::string& origin);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config);

/// Field-by-field validation; each message names the offending field. Seed
/// file and output dir requirements depend on the command.
std::vector<std::string> validate_config(const RunConfig& config, bool need_seed_file,
                                         bool need_output_dir = true);

/// Instantiate the configured backend. For http the credential comes from
/// the environment variable named by backend.api_key_env.
std::unique_ptr<Backend> make_backend(const RunConfig& config);

}  // namespace selfcurate
