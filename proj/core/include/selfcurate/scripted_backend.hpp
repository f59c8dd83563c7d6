#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "selfcurate/backend.hpp"
#include "selfcurate/types.hpp"

namespace selfcurate {

/// One pattern -> response mapping. Unset match fields are wildcards; rules
/// are tried in insertion order and the first match wins. `responses` is
/// indexed by InferenceRequest::attempt (clamped to the last entry), so a
/// re-issued call can be scripted differently from the first issue while the
/// lookup stays a pure function of the request.
struct ScriptRule {
  std::optional<std::string> question_id;
  std::optional<int> candidate_index;
  std::optional<CallPurpose> purpose;
  std::optional<Stage> stage;
  std::optional<int> vote_index;
  std::optional<int> attempt;

  std::vector<std::string> responses;
  FinishReason finish_reason = FinishReason::stop;

  // Transient-failure injection for retry tests: the first `fail_times`
  // matching calls throw `fail_kind` before the rule starts responding.
  int fail_times = 0;
  std::string fail_kind = "rate_limit";

  bool matches(const InferenceRequest& request) const;
};

/// Deterministic backend driven by a verdict script. Same request (including
/// attempt) yields a byte-identical response; an unscripted key with no
/// default throws ScriptMissError.
class ScriptedBackend : public Backend {
 public:
  InferenceResponse complete(const InferenceRequest& request) override;
  std::string name() const override { return "scripted"; }

  void set_default(std::string response) { default_response_ = std::move(response); }
  void set_latency_ms(int ms) { latency_ms_ = ms; }

  ScriptRule& add_rule(ScriptRule rule);

  // Builders for the common shapes.
  void on_generate(const std::string& question_id, int candidate_index, std::string text,
                   FinishReason finish = FinishReason::stop);
  void on_generate_all(std::string text, FinishReason finish = FinishReason::stop);
  void on_infer(const std::string& question_id, int candidate_index, std::string text);
  void on_infer_all(std::string text);
  void on_judge(const std::string& question_id, int candidate_index, Stage stage,
                int vote_index, std::string response);
  void on_judge_all(const std::string& question_id, int candidate_index, Stage stage,
                    std::string response);

  // Introspection for tests and call accounting.
  int total_calls() const;
  std::vector<InferenceRequest> call_log() const;
  int calls_matching(const std::function<bool(const InferenceRequest&)>& pred) const;
  int max_observed_in_flight() const;

  /// Load a script file: {"default": "...", "latency_ms": N, "rules": [...]}.
  static std::unique_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);
  static std::unique_ptr<ScriptedBackend> from_json_text(const std::string& text,
                                                         const std::string& origin);

 private:
  std::vector<ScriptRule> rules_;
  std::optional<std::string> default_response_;
  int latency_ms_ = 0;

  mutable std::mutex mutex_;
  std::vector<InferenceRequest> log_;
  std::vector<int> fail_budget_;  // parallel to rules_
  int in_flight_ = 0;
  int max_in_flight_ = 0;
};

}  // namespace selfcurate
