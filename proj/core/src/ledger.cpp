#include "selfcurate/ledger.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "json_detail.hpp"
#include "selfcurate/util.hpp"

namespace selfcurate {

using ojson = nlohmann::ordered_json;

namespace detail {

ojson record_to_json(const VerificationRecord& record) {
  ojson stages = ojson::array();
  for (const StageResult& sr : record.stage_results) {
    ojson votes = ojson::array();
    for (Verdict v : sr.votes) votes.push_back(std::string(to_string(v)));
    ojson stage = {
        {"stage", std::string(to_string(sr.stage))},
        {"votes", std::move(votes)},
        {"passed", sr.passed},
        {"calls_used", sr.calls_used},
        {"parse_retries", sr.parse_retries},
    };
    if (!sr.error.empty()) stage["error"] = sr.error;
    stages.push_back(std::move(stage));
  }
  return ojson{
      {"accepted", record.accepted},
      {"total_calls", record.total_calls},
      {"stages", std::move(stages)},
  };
}

VerificationRecord record_from_json(const ojson& j, const std::string& question_id,
                                    int candidate_index) {
  VerificationRecord record;
  record.question_id = question_id;
  record.candidate_index = candidate_index;
  record.accepted = j.at("accepted").get<bool>();
  record.total_calls = j.at("total_calls").get<int>();
  for (const ojson& s : j.at("stages")) {
    StageResult sr;
    auto stage = stage_from_string(s.at("stage").get<std::string>());
    if (!stage) throw IoError("ledger: bad stage name in record");
    sr.stage = *stage;
    for (const ojson& v : s.at("votes")) {
      auto verdict = verdict_from_string(v.get<std::string>());
      if (!verdict) throw IoError("ledger: bad verdict in record");
      sr.votes.push_back(*verdict);
    }
    sr.passed = s.at("passed").get<bool>();
    sr.calls_used = s.at("calls_used").get<int>();
    sr.parse_retries = s.value("parse_retries", 0);
    sr.error = s.value("error", "");
    record.stage_results.push_back(std::move(sr));
  }
  return record;
}

}  // namespace detail

using detail::record_from_json;
using detail::record_to_json;

namespace {

ojson candidate_to_json(const CandidateOutcome& c) {
  ojson j = {
      {"index", c.index},
      {"wellformed", c.wellformed},
      {"finish_reason", std::string(to_string(c.finish_reason))},
      {"text_digest", c.text_digest},
  };
  if (!c.error.empty()) j["error"] = c.error;
  if (c.record) j["record"] = record_to_json(*c.record);
  if (c.text_stored) {
    j["raw_text"] = c.raw_text;
    j["solution_text"] = c.solution_text;
  }
  return j;
}

CandidateOutcome candidate_from_json(const ojson& j, const std::string& question_id) {
  CandidateOutcome c;
  c.index = j.at("index").get<int>();
  c.wellformed = j.at("wellformed").get<bool>();
  auto finish = finish_reason_from_string(j.at("finish_reason").get<std::string>());
  if (!finish) throw IoError("ledger: bad finish_reason in candidate");
  c.finish_reason = *finish;
  c.error = j.value("error", "");
  c.text_digest = j.value("text_digest", "");
  if (j.contains("record")) {
    c.record = record_from_json(j.at("record"), question_id, c.index);
  }
  if (j.contains("raw_text")) {
    c.text_stored = true;
    c.raw_text = j.at("raw_text").get<std::string>();
    c.solution_text = j.value("solution_text", "");
  }
  return c;
}

ojson seed_to_json(const SeedOutcome& seed) {
  ojson candidates = ojson::array();
  for (const CandidateOutcome& c : seed.candidates) candidates.push_back(candidate_to_json(c));
  ojson j = {
      {"question_id", seed.question_id},
      {"outcome", seed.outcome},
      {"calls", seed.total_calls()},
      {"generation_calls", seed.generation_calls},
      {"verification_calls", seed.verification_calls},
      {"parse_retries", seed.parse_retries},
      {"candidates", std::move(candidates)},
      {"selected", seed.selected},
  };
  if (!seed.error.empty()) j["error"] = seed.error;
  return j;
}

SeedOutcome seed_from_json(const ojson& j) {
  SeedOutcome seed;
  seed.question_id = j.at("question_id").get<std::string>();
  seed.outcome = j.at("outcome").get<std::string>();
  seed.error = j.value("error", "");
  seed.generation_calls = j.at("generation_calls").get<int>();
  seed.verification_calls = j.at("verification_calls").get<int>();
  seed.parse_retries = j.value("parse_retries", 0);
  for (const ojson& c : j.at("candidates")) {
    seed.candidates.push_back(candidate_from_json(c, seed.question_id));
  }
  seed.selected = j.at("selected").get<std::vector<int>>();
  return seed;
}

}  // namespace

std::string ledger_event_to_line(const LedgerEvent& event) {
  ojson j;
  switch (event.kind) {
    case LedgerEvent::Kind::run_start:
      j = {
          {"event", "run_start"},
          {"ts", event.ts},
          {"mode", event.start.mode},
          {"n", event.start.n},
          {"v", event.start.v},
          {"verifier", std::string(to_string(event.start.kind))},
          {"policy", std::string(to_string(event.start.policy))},
          {"seed_count", event.start.seed_count},
          {"dropped_answer_fields", event.start.dropped_answer_fields},
          {"config_digest", event.start.config_digest},
      };
      break;
    case LedgerEvent::Kind::seed_done:
      j = seed_to_json(event.seed);
      j["event"] = "seed_done";
      j["ts"] = event.ts;
      j["unit"] = "seed:" + event.seed.question_id;
      break;
    case LedgerEvent::Kind::ttc_done:
      j = seed_to_json(event.seed);
      j["event"] = "ttc_done";
      j["ts"] = event.ts;
      j["unit"] = "ttc:" + event.seed.question_id;
      j["chosen_index"] = event.ttc.chosen_index;
      j["accepted"] = event.ttc.accepted;
      j["chosen_wellformed"] = event.ttc.chosen_wellformed;
      j["candidates_tried"] = event.ttc.candidates_tried;
      break;
    case LedgerEvent::Kind::run_complete:
      j = {{"event", "run_complete"}, {"ts", event.ts}};
      break;
  }
  return j.dump();
}

LedgerEvent ledger_event_from_line(const std::string& line) {
  ojson j = ojson::parse(line);
  LedgerEvent event;
  event.ts = j.value("ts", "");
  std::string kind = j.at("event").get<std::string>();
  if (kind == "run_start") {
    event.kind = LedgerEvent::Kind::run_start;
    event.start.mode = j.value("mode", "");
    event.start.n = j.value("n", 0);
    event.start.v = j.value("v", 0);
    if (auto k = verifier_kind_from_string(j.value("verifier", "uq"))) event.start.kind = *k;
    if (auto p = selection_policy_from_string(j.value("policy", "first_valid"))) {
      event.start.policy = *p;
    }
    event.start.seed_count = j.value("seed_count", 0);
    event.start.dropped_answer_fields = j.value("dropped_answer_fields", 0);
    event.start.config_digest = j.value("config_digest", "");
  } else if (kind == "seed_done" || kind == "ttc_done") {
    event.kind =
        kind == "seed_done" ? LedgerEvent::Kind::seed_done : LedgerEvent::Kind::ttc_done;
    event.seed = seed_from_json(j);
    if (event.kind == LedgerEvent::Kind::ttc_done) {
      event.ttc.chosen_index = j.value("chosen_index", -1);
      event.ttc.accepted = j.value("accepted", false);
      event.ttc.chosen_wellformed = j.value("chosen_wellformed", false);
      event.ttc.candidates_tried = j.value("candidates_tried", 0);
    }
  } else if (kind == "run_complete") {
    event.kind = LedgerEvent::Kind::run_complete;
  } else {
    throw IoError("ledger: unknown event kind '" + kind + "'");
  }
  return event;
}

RunLedger::RunLedger(const std::filesystem::path& path) : path_(path) {
  out_.open(path, std::ios::app);
  if (!out_) {
    throw IoError("ledger: cannot open " + path.string() + " for append");
  }
}

void RunLedger::append(const LedgerEvent& event) {
  std::string line = ledger_event_to_line(event);
  std::lock_guard lock(mutex_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) {
    throw IoError("ledger: append failed for " + path_.string());
  }
}

std::vector<LedgerEvent> read_ledger(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("ledger: cannot open " + path.string());
  }
  std::vector<LedgerEvent> events;
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  for (size_t i = 0; i < lines.size(); ++i) {
    try {
      events.push_back(ledger_event_from_line(lines[i]));
    } catch (const nlohmann::json::exception& e) {
      if (i + 1 == lines.size()) {
        break;  // torn trailing line from a killed run
      }
      throw IoError("ledger: parse error at line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return events;
}

LedgerReplay replay_ledger(const std::vector<LedgerEvent>& events) {
  LedgerReplay replay;
  for (const LedgerEvent& event : events) {
    switch (event.kind) {
      case LedgerEvent::Kind::run_start:
        if (!replay.start) replay.start = event.start;
        break;
      case LedgerEvent::Kind::seed_done:
        replay.completed[event.seed.question_id] = event.seed;
        break;
      case LedgerEvent::Kind::ttc_done:
        replay.completed[event.seed.question_id] = event.seed;
        replay.ttc_info[event.seed.question_id] = event.ttc;
        break;
      case LedgerEvent::Kind::run_complete:
        replay.run_complete = true;
        break;
    }
  }
  return replay;
}

}  // namespace selfcurate
