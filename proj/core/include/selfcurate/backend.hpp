#pragma once

#include <memory>
#include <string>

#include "selfcurate/types.hpp"
#include "selfcurate/util.hpp"

namespace selfcurate {

/// Chat-completion backend: a single user message in, one completion out.
/// Implementations must be safe to call from many threads at once.
class Backend {
 public:
  virtual ~Backend() = default;

  /// Throws a BackendError subclass on failure; never silently drops
  /// finish_reason.
  virtual InferenceResponse complete(const InferenceRequest& request) = 0;

  virtual std::string name() const = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 250;
  double backoff_multiplier = 2.0;
  int max_backoff_ms = 8000;
};

struct CompletionResult {
  InferenceResponse response;
  int attempts = 1;
};

/// Retries retryable BackendErrors up to policy.max_attempts with bounded
/// exponential backoff. Non-retryable errors propagate immediately; an
/// exhausted policy throws RetriesExhaustedError carrying the last cause.
CompletionResult complete_with_retry(Backend& backend, const InferenceRequest& request,
                                     const RetryPolicy& policy);

/// Bounds in-flight calls to an inner backend with a shared semaphore.
class ThrottledBackend : public Backend {
 public:
  ThrottledBackend(Backend& inner, int max_in_flight)
      : inner_(inner), gate_(max_in_flight) {}

  InferenceResponse complete(const InferenceRequest& request) override {
    SemaphoreGuard guard(gate_);
    return inner_.complete(request);
  }

  std::string name() const override { return inner_.name(); }

 private:
  Backend& inner_;
  Semaphore gate_;
};

}  // namespace selfcurate
