#include "selfcurate/verifier.hpp"

#include <algorithm>
#include <stdexcept>

#include "selfcurate/util.hpp"

namespace selfcurate {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::parse_failure: return "parse_failure";
  }
  return "?";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
  if (s == "yes") return Verdict::yes;
  if (s == "no") return Verdict::no;
  if (s == "parse_failure") return Verdict::parse_failure;
  return std::nullopt;
}

Verdict parse_verdict(std::string_view judge_text) {
  auto yes_pos = judge_text.rfind("[[Y]]");
  auto no_pos = judge_text.rfind("[[N]]");
  if (yes_pos == std::string_view::npos && no_pos == std::string_view::npos) {
    return Verdict::parse_failure;
  }
  if (no_pos == std::string_view::npos) return Verdict::yes;
  if (yes_pos == std::string_view::npos) return Verdict::no;
  return yes_pos > no_pos ? Verdict::yes : Verdict::no;
}

namespace {

struct VoteOutcome {
  Verdict verdict = Verdict::parse_failure;
  bool reissued = false;
};

// One judge call: render, complete, parse.
Verdict single_judge_vote(const SeedQuestion& question, const Candidate& candidate,
                          Stage stage, int vote_index, int attempt, Backend& backend,
                          const VerifyOptions& options) {
  const PromptTemplates& templates = *options.templates;
  std::string prompt;
  switch (stage) {
    case Stage::fact:
      prompt = render_fact_prompt(templates, question.question, candidate.solution_text);
      break;
    case Stage::correctness:
      prompt =
          render_correctness_prompt(templates, question.question, candidate.solution_text);
      break;
    case Stage::simple:
      prompt = render_simple_prompt(templates, question.question, candidate.solution_text);
      break;
    case Stage::cycle:
      throw std::logic_error("cycle votes are handled by cycle_vote");
  }
  InferenceRequest request;
  request.unit_key = {question.id, candidate.index, CallPurpose::judge, stage, vote_index};
  request.prompt = std::move(prompt);
  request.params = options.params;
  request.seed_hint = vote_index;
  request.attempt = attempt;
  auto result = complete_with_retry(backend, request, options.retry);
  return parse_verdict(result.response.text);
}

// One cycle vote: infer the question from the answer, then judge whether it
// matches the original. An empty inferred question is treated like a parse
// failure of the vote.
Verdict cycle_vote(const SeedQuestion& question, const Candidate& candidate, int vote_index,
                   int attempt, Backend& backend, const VerifyOptions& options) {
  const PromptTemplates& templates = *options.templates;

  InferenceRequest infer_request;
  infer_request.unit_key = {question.id, candidate.index, CallPurpose::infer_question,
                            Stage::cycle, vote_index};
  infer_request.prompt = render_cycle_infer_prompt(templates, candidate.solution_text);
  infer_request.params = options.params;
  infer_request.seed_hint = vote_index;
  infer_request.attempt = attempt;
  auto infer_result = complete_with_retry(backend, infer_request, options.retry);
  std::string inferred = strip_reasoning(infer_result.response.text, options.markers);
  if (inferred.empty()) {
    return Verdict::parse_failure;
  }

  InferenceRequest judge_request;
  judge_request.unit_key = {question.id, candidate.index, CallPurpose::judge, Stage::cycle,
                            vote_index};
  judge_request.prompt = render_cycle_compare_prompt(templates, question.question, inferred);
  judge_request.params = options.params;
  judge_request.seed_hint = vote_index;
  judge_request.attempt = attempt;
  auto judge_result = complete_with_retry(backend, judge_request, options.retry);
  return parse_verdict(judge_result.response.text);
}

VoteOutcome run_vote(const SeedQuestion& question, const Candidate& candidate, Stage stage,
                     int vote_index, Backend& backend, const VerifyOptions& options) {
  VoteOutcome outcome;
  for (int attempt = 0; attempt < 2; ++attempt) {
    outcome.verdict = stage == Stage::cycle
                          ? cycle_vote(question, candidate, vote_index, attempt, backend,
                                       options)
                          : single_judge_vote(question, candidate, stage, vote_index, attempt,
                                              backend, options);
    if (outcome.verdict != Verdict::parse_failure) break;
    if (attempt == 0) outcome.reissued = true;
  }
  return outcome;
}

}  // namespace

StageResult run_stage(const SeedQuestion& question, const Candidate& candidate, Stage stage,
                      Backend& backend, const VerifyOptions& options) {
  if (options.v < 1) throw std::invalid_argument("run_stage: v must be >= 1");
  if (!candidate.wellformed) {
    throw std::invalid_argument("run_stage: candidate must be wellformed");
  }

  StageResult result;
  result.stage = stage;
  const int calls_per_vote = stage == Stage::cycle ? 2 : 1;
  for (int vote = 0; vote < options.v; ++vote) {
    VoteOutcome outcome;
    try {
      outcome = run_vote(question, candidate, stage, vote, backend, options);
    } catch (const RetriesExhaustedError& e) {
      result.passed = false;
      result.error = e.what();
      return result;
    }
    result.votes.push_back(outcome.verdict);
    result.calls_used += calls_per_vote;
    if (outcome.reissued) ++result.parse_retries;
    if (options.short_circuit && outcome.verdict != Verdict::yes) break;
  }
  result.passed = int(result.votes.size()) == options.v &&
                  std::all_of(result.votes.begin(), result.votes.end(),
                              [](Verdict v) { return v == Verdict::yes; });
  return result;
}

VerificationRecord verify_candidate(const SeedQuestion& question, const Candidate& candidate,
                                    Backend& backend, const VerifyOptions& options) {
  if (!candidate.wellformed) {
    throw std::invalid_argument("verify_candidate: candidate must be wellformed");
  }
  VerificationRecord record;
  record.question_id = question.id;
  record.candidate_index = candidate.index;
  const auto stages = stages_for(options.kind);
  for (Stage stage : stages) {
    StageResult stage_result = run_stage(question, candidate, stage, backend, options);
    record.total_calls += stage_result.calls_used;
    bool passed = stage_result.passed;
    record.stage_results.push_back(std::move(stage_result));
    if (!passed) break;
  }
  record.accepted = record.stage_results.size() == stages.size() &&
                    std::all_of(record.stage_results.begin(), record.stage_results.end(),
                                [](const StageResult& sr) { return sr.passed; });
  return record;
}

}  // namespace selfcurate
