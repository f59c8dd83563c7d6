#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "selfcurate/backend.hpp"
#include "selfcurate/generation.hpp"
#include "selfcurate/prompts.hpp"
#include "selfcurate/types.hpp"

namespace selfcurate {

enum class Verdict { yes, no, parse_failure };

std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

/// Scans for the literal markers [[Y]] and [[N]]; whichever occurs last wins.
/// Neither marker present -> parse_failure. Total and deterministic.
Verdict parse_verdict(std::string_view judge_text);

struct StageResult {
  Stage stage = Stage::simple;
  std::vector<Verdict> votes;  // final per-vote verdicts, at most v
  bool passed = false;
  // Structural call count: two calls per cycle vote, one per vote otherwise.
  // A parse-failure re-issue replaces its vote's call(s) and is tracked in
  // parse_retries instead, which keeps per-candidate totals within the
  // n + 4vn budget for every script.
  int calls_used = 0;
  int parse_retries = 0;
  std::string error;  // annotation when a call exhausted its retries
};

struct VerificationRecord {
  std::string question_id;
  int candidate_index = 0;
  std::vector<StageResult> stage_results;  // stages after the first failure are absent
  bool accepted = false;
  int total_calls = 0;
};

struct VerifyOptions {
  int v = 1;
  VerifierKind kind = VerifierKind::uq;
  // Vote-level early stop within a stage. The cascade always stops at the
  // first failed stage; unanimity makes the accept bit identical either way.
  bool short_circuit = true;
  SamplingParams params;
  RetryPolicy retry;
  ReasoningMarkers markers;
  const PromptTemplates* templates = &PromptTemplates::builtin();
};

/// Issues up to v votes for one stage. A cycle vote chains two calls (infer
/// the question, then compare); a parse failure re-issues the vote's call(s)
/// once and then counts as no.
StageResult run_stage(const SeedQuestion& question, const Candidate& candidate, Stage stage,
                      Backend& backend, const VerifyOptions& options);

/// Runs the stage cascade for one wellformed candidate: cycle, fact,
/// correctness for the uq kind, the single simple stage otherwise. Accepted
/// only if every stage passes all its votes.
VerificationRecord verify_candidate(const SeedQuestion& question, const Candidate& candidate,
                                    Backend& backend, const VerifyOptions& options);

}  // namespace selfcurate
