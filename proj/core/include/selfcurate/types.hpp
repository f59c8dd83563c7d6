#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace selfcurate {

// ---------------------------------------------------------------------------
// Enums shared across the pipeline
// ---------------------------------------------------------------------------

enum class Stage { cycle, fact, correctness, simple };

enum class CallPurpose {
  generate,        // candidate solution sampling
  infer_question,  // first call of a cycle-consistency vote
  judge,           // any call whose reply is parsed for a verdict
};

enum class FinishReason { stop, length, error };

enum class VerifierKind { uq, simple };

enum class SelectionPolicy { first_valid, all_valid };

enum class Domain { math, science, code, other };

std::string_view to_string(Stage s);
std::string_view to_string(CallPurpose p);
std::string_view to_string(FinishReason f);
std::string_view to_string(VerifierKind k);
std::string_view to_string(SelectionPolicy p);
std::string_view to_string(Domain d);

std::optional<Stage> stage_from_string(std::string_view s);
std::optional<CallPurpose> purpose_from_string(std::string_view s);
std::optional<FinishReason> finish_reason_from_string(std::string_view s);
std::optional<VerifierKind> verifier_kind_from_string(std::string_view s);
std::optional<SelectionPolicy> selection_policy_from_string(std::string_view s);
std::optional<Domain> domain_from_string(std::string_view s);

/// Stage order for a verifier kind: {cycle, fact, correctness} or {simple}.
std::vector<Stage> stages_for(VerifierKind kind);

// ---------------------------------------------------------------------------
// Inference request/response
// ---------------------------------------------------------------------------

struct SamplingParams {
  double temperature = 0.8;
  double top_p = 0.95;
  int max_output_tokens = 32768;
};

/// Identity of one logical inference call within a run. The same tuple is
/// never issued twice concurrently; a parse-failure re-issue keeps the key
/// and bumps InferenceRequest::attempt instead.
struct UnitKey {
  std::string question_id;
  int candidate_index = 0;
  CallPurpose purpose = CallPurpose::generate;
  std::optional<Stage> stage;  // absent for generation calls
  int vote_index = 0;

  bool operator==(const UnitKey&) const = default;

  /// Human-readable form, e.g. "q1/c0/judge/fact/v2".
  std::string str() const;
};

struct InferenceRequest {
  UnitKey unit_key;
  std::string prompt;
  SamplingParams params;
  int seed_hint = 0;
  int attempt = 0;  // 0 = first issue, 1 = parse-failure re-issue
};

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct InferenceResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::stop;
  TokenUsage usage;
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for backend call failures. `retryable` drives the retry policy:
/// transport failures, HTTP 5xx and 429 retry; other 4xx and malformed
/// bodies do not.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& what, bool retryable)
      : std::runtime_error(what), retryable_(retryable) {}

  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

class TransportError : public BackendError {
 public:
  explicit TransportError(const std::string& what) : BackendError(what, true) {}
};

class HttpStatusError : public BackendError {
 public:
  HttpStatusError(int status, const std::string& what)
      : BackendError(what, status == 429 || status >= 500), status_(status) {}

  int status() const { return status_; }

 private:
  int status_;
};

class MalformedResponseError : public BackendError {
 public:
  explicit MalformedResponseError(const std::string& what) : BackendError(what, false) {}
};

/// A mock call hit a unit key with no script rule and no default.
class ScriptMissError : public BackendError {
 public:
  explicit ScriptMissError(const std::string& what) : BackendError(what, false) {}
};

/// Terminal failure after the retry policy is exhausted.
class RetriesExhaustedError : public BackendError {
 public:
  RetriesExhaustedError(int attempts, const std::string& cause)
      : BackendError("retries exhausted after " + std::to_string(attempts) +
                         " attempt(s): " + cause,
                     false),
        attempts_(attempts),
        cause_(cause) {}

  int attempts() const { return attempts_; }
  const std::string& cause() const { return cause_; }

 private:
  int attempts_;
  std::string cause_;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace selfcurate
