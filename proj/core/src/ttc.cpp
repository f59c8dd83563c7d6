#include "selfcurate/ttc.hpp"

#include "selfcurate/util.hpp"

namespace selfcurate {

TtcResult answer_with_ttc(const SeedQuestion& question, const TtcOptions& options,
                          Backend& backend) {
  if (options.n < 1 || options.v < 1) {
    throw std::invalid_argument("answer_with_ttc: n and v must be >= 1");
  }

  VerifyOptions verify_options;
  verify_options.v = options.v;
  verify_options.kind = options.kind;
  verify_options.short_circuit = options.short_circuit;
  verify_options.params = options.params;
  verify_options.retry = options.retry;
  verify_options.markers = options.markers;
  verify_options.templates = options.templates;

  TtcResult result;
  result.question_id = question.id;

  for (int i = 0; i < options.n; ++i) {
    InferenceRequest request;
    request.unit_key = {question.id, i, CallPurpose::generate, std::nullopt, 0};
    request.prompt = question.question;
    request.params = options.params;
    request.seed_hint = i;

    Candidate candidate;
    try {
      auto completion = complete_with_retry(backend, request, options.retry);
      candidate = make_candidate(question.id, i, completion.response, options.markers);
    } catch (const BackendError& e) {
      candidate.question_id = question.id;
      candidate.index = i;
      candidate.finish_reason = FinishReason::error;
      candidate.error = e.what();
    }
    ++result.total_calls;
    result.candidates_tried = i + 1;
    result.candidates.push_back(candidate);

    if (!candidate.wellformed) continue;

    VerificationRecord record = verify_candidate(question, candidate, backend, verify_options);
    result.total_calls += record.total_calls;
    bool accepted = record.accepted;
    result.records.push_back(std::move(record));
    if (accepted) {
      result.chosen_candidate_index = i;
      result.chosen_text = candidate.solution_text;
      result.accepted = true;
      result.chosen_wellformed = true;
      break;
    }
  }

  if (!result.accepted && !result.candidates.empty()) {
    const Candidate& first = result.candidates.front();
    result.chosen_candidate_index = 0;
    result.chosen_wellformed = first.wellformed;
    result.chosen_text = first.wellformed ? first.solution_text : first.raw_text;
  }
  return result;
}

SeedOutcome ttc_to_outcome(const TtcResult& result) {
  SeedOutcome outcome;
  outcome.question_id = result.question_id;
  outcome.generation_calls = result.candidates_tried;
  for (const Candidate& candidate : result.candidates) {
    CandidateOutcome co;
    co.index = candidate.index;
    co.wellformed = candidate.wellformed;
    co.finish_reason = candidate.finish_reason;
    co.error = candidate.error;
    co.text_digest = sha256_hex(candidate.raw_text);
    for (const VerificationRecord& record : result.records) {
      if (record.candidate_index == candidate.index) {
        co.record = record;
        outcome.verification_calls += record.total_calls;
        for (const StageResult& sr : record.stage_results) {
          outcome.parse_retries += sr.parse_retries;
        }
        break;
      }
    }
    if (candidate.index == result.chosen_candidate_index) {
      co.text_stored = true;
      co.raw_text = candidate.raw_text;
      co.solution_text = candidate.solution_text;
    }
    outcome.candidates.push_back(std::move(co));
  }
  if (result.accepted) {
    outcome.selected.push_back(result.chosen_candidate_index);
  }
  return outcome;
}

TtcInfo ttc_to_info(const TtcResult& result) {
  TtcInfo info;
  info.chosen_index = result.chosen_candidate_index;
  info.accepted = result.accepted;
  info.chosen_wellformed = result.chosen_wellformed;
  info.candidates_tried = result.candidates_tried;
  return info;
}

}  // namespace selfcurate
