#pragma once

#include <string>
#include <vector>

#include "selfcurate/backend.hpp"
#include "selfcurate/generation.hpp"
#include "selfcurate/ledger.hpp"
#include "selfcurate/prompts.hpp"
#include "selfcurate/verifier.hpp"

namespace selfcurate {

struct TtcResult {
  std::string question_id;
  int chosen_candidate_index = -1;
  std::string chosen_text;
  bool accepted = false;           // false = fallback answer
  bool chosen_wellformed = false;  // false = fallback is a malformed completion
  int candidates_tried = 0;
  int total_calls = 0;
  std::vector<Candidate> candidates;
  std::vector<VerificationRecord> records;  // one per verified candidate
};

struct TtcOptions {
  int n = 8;
  int v = 5;
  VerifierKind kind = VerifierKind::uq;
  bool short_circuit = true;
  SamplingParams params;
  RetryPolicy retry;
  ReasoningMarkers markers;
  const PromptTemplates* templates = &PromptTemplates::builtin();
};

/// Answer one question at test time: candidates are generated lazily in
/// index order and verified as they arrive; the first accepted candidate is
/// returned. When none is accepted after n, candidate 0's text is returned
/// flagged accepted=false.
TtcResult answer_with_ttc(const SeedQuestion& question, const TtcOptions& options,
                          Backend& backend);

/// Ledger payload for a TTC run. The chosen candidate's text is stored.
SeedOutcome ttc_to_outcome(const TtcResult& result);
TtcInfo ttc_to_info(const TtcResult& result);

}  // namespace selfcurate
