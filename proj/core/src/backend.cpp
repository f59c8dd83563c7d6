#include "selfcurate/backend.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace selfcurate {

CompletionResult complete_with_retry(Backend& backend, const InferenceRequest& request,
                                     const RetryPolicy& policy) {
  int attempts = 0;
  double backoff = double(policy.initial_backoff_ms);
  std::string last_cause;
  while (attempts < policy.max_attempts) {
    ++attempts;
    try {
      return {backend.complete(request), attempts};
    } catch (const BackendError& e) {
      if (!e.retryable()) throw;
      last_cause = e.what();
    }
    if (attempts < policy.max_attempts && backoff > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(long(backoff)));
      backoff = std::min(backoff * policy.backoff_multiplier, double(policy.max_backoff_ms));
    }
  }
  throw RetriesExhaustedError(attempts, last_cause);
}

}  // namespace selfcurate
