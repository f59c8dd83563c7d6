#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "selfcurate/backend.hpp"
#include "selfcurate/types.hpp"

namespace selfcurate {

/// Delimiters of the model's reasoning block. The solution is everything
/// after the first close marker. An empty close marker means the model emits
/// no reasoning block and the whole completion is the solution.
struct ReasoningMarkers {
  std::string open = "<think>";
  std::string close = "</think>";
};

struct SeedQuestion {
  std::string id;
  std::string question;
  Domain domain = Domain::other;
};

struct Candidate {
  std::string question_id;
  int index = 0;
  std::string raw_text;       // full completion, reasoning trace included
  std::string solution_text;  // trimmed post-reasoning answer portion
  bool wellformed = false;
  FinishReason finish_reason = FinishReason::error;
  std::string error;  // annotation when the generation call failed
};

/// Trimmed text after the first close marker (whole text if no markers are
/// configured); empty when the marker is configured but absent.
std::string extract_solution(std::string_view raw_text, const ReasoningMarkers& markers);

/// Like extract_solution, but text without a close marker passes through
/// whole: a missing reasoning block is fine for judge replies and ad-hoc
/// answers, only candidate filtering treats it as malformed.
std::string strip_reasoning(std::string_view text, const ReasoningMarkers& markers);

/// Malformedness filter: truncated output, missing reasoning-trace close
/// marker, or an empty answer portion all disqualify a candidate.
bool is_wellformed(const Candidate& candidate, const ReasoningMarkers& markers);

Candidate make_candidate(const std::string& question_id, int index,
                         const InferenceResponse& response, const ReasoningMarkers& markers);

/// Sample exactly n candidates with indices 0..n-1. A generation call that
/// fails after retries degrades to a malformed candidate; the run proceeds.
std::vector<Candidate> sample_candidates(const SeedQuestion& question, int n,
                                         const SamplingParams& params, Backend& backend,
                                         const RetryPolicy& retry,
                                         const ReasoningMarkers& markers);

struct SeedLoadResult {
  std::vector<SeedQuestion> seeds;
  int dropped_answer_fields = 0;  // fields beyond {id, question, domain}
};

/// Line-delimited JSON seed records {id, question, domain?}. Any other field
/// (answers, reasoning traces) is dropped and counted; ids must be unique.
SeedLoadResult load_seed_file(const std::filesystem::path& path);

}  // namespace selfcurate
