#include "selfcurate/types.hpp"

namespace selfcurate {

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::cycle: return "cycle";
    case Stage::fact: return "fact";
    case Stage::correctness: return "correctness";
    case Stage::simple: return "simple";
  }
  return "?";
}

std::string_view to_string(CallPurpose p) {
  switch (p) {
    case CallPurpose::generate: return "generate";
    case CallPurpose::infer_question: return "infer_question";
    case CallPurpose::judge: return "judge";
  }
  return "?";
}

std::string_view to_string(FinishReason f) {
  switch (f) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::error: return "error";
  }
  return "?";
}

std::string_view to_string(VerifierKind k) {
  switch (k) {
    case VerifierKind::uq: return "uq";
    case VerifierKind::simple: return "simple";
  }
  return "?";
}

std::string_view to_string(SelectionPolicy p) {
  switch (p) {
    case SelectionPolicy::first_valid: return "first_valid";
    case SelectionPolicy::all_valid: return "all_valid";
  }
  return "?";
}

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::math: return "math";
    case Domain::science: return "science";
    case Domain::code: return "code";
    case Domain::other: return "other";
  }
  return "?";
}

std::optional<Stage> stage_from_string(std::string_view s) {
  if (s == "cycle") return Stage::cycle;
  if (s == "fact") return Stage::fact;
  if (s == "correctness") return Stage::correctness;
  if (s == "simple") return Stage::simple;
  return std::nullopt;
}

std::optional<CallPurpose> purpose_from_string(std::string_view s) {
  if (s == "generate") return CallPurpose::generate;
  if (s == "infer_question") return CallPurpose::infer_question;
  if (s == "judge") return CallPurpose::judge;
  return std::nullopt;
}

std::optional<FinishReason> finish_reason_from_string(std::string_view s) {
  if (s == "stop") return FinishReason::stop;
  if (s == "length") return FinishReason::length;
  if (s == "error") return FinishReason::error;
  return std::nullopt;
}

std::optional<VerifierKind> verifier_kind_from_string(std::string_view s) {
  if (s == "uq") return VerifierKind::uq;
  if (s == "simple") return VerifierKind::simple;
  return std::nullopt;
}

std::optional<SelectionPolicy> selection_policy_from_string(std::string_view s) {
  if (s == "first_valid") return SelectionPolicy::first_valid;
  if (s == "all_valid") return SelectionPolicy::all_valid;
  return std::nullopt;
}

std::optional<Domain> domain_from_string(std::string_view s) {
  if (s == "math") return Domain::math;
  if (s == "science") return Domain::science;
  if (s == "code") return Domain::code;
  if (s == "other") return Domain::other;
  return std::nullopt;
}

std::vector<Stage> stages_for(VerifierKind kind) {
  if (kind == VerifierKind::uq) {
    return {Stage::cycle, Stage::fact, Stage::correctness};
  }
  return {Stage::simple};
}

std::string UnitKey::str() const {
  std::string out = question_id;
  out += "/c" + std::to_string(candidate_index);
  out += "/";
  out += to_string(purpose);
  if (stage) {
    out += "/";
    out += to_string(*stage);
  }
  out += "/v" + std::to_string(vote_index);
  return out;
}

}  // namespace selfcurate
