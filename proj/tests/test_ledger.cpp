#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracle.hpp"
#include "selfcurate/curation.hpp"
#include "selfcurate/ledger.hpp"

using namespace selfcurate;

namespace {

SeedOutcome sample_outcome() {
  SeedOutcome outcome;
  outcome.question_id = "q3";
  outcome.generation_calls = 2;
  outcome.verification_calls = 6;
  outcome.parse_retries = 1;

  CandidateOutcome accepted;
  accepted.index = 0;
  accepted.wellformed = true;
  accepted.finish_reason = FinishReason::stop;
  accepted.text_digest = "abc123";
  VerificationRecord record;
  record.question_id = "q3";
  record.candidate_index = 0;
  record.accepted = true;
  record.total_calls = 4;
  StageResult stage;
  stage.stage = Stage::cycle;
  stage.votes = {Verdict::yes};
  stage.passed = true;
  stage.calls_used = 2;
  record.stage_results.push_back(stage);
  stage.stage = Stage::fact;
  stage.calls_used = 1;
  stage.parse_retries = 1;
  record.stage_results.push_back(stage);
  stage.stage = Stage::correctness;
  stage.parse_retries = 0;
  record.stage_results.push_back(stage);
  accepted.record = record;
  accepted.text_stored = true;
  accepted.raw_text = "<think>t</think>\nanswer";
  accepted.solution_text = "answer";
  outcome.candidates.push_back(accepted);

  CandidateOutcome malformed;
  malformed.index = 1;
  malformed.wellformed = false;
  malformed.finish_reason = FinishReason::length;
  malformed.text_digest = "def456";
  outcome.candidates.push_back(malformed);

  outcome.selected = {0};
  return outcome;
}

}  // namespace

TEST_CASE("ledger events round-trip through their line form") {
  LedgerEvent event;
  event.kind = LedgerEvent::Kind::seed_done;
  event.ts = "2026-01-01T00:00:00.000Z";
  event.seed = sample_outcome();

  std::string line = ledger_event_to_line(event);
  LedgerEvent parsed = ledger_event_from_line(line);
  CHECK(parsed.kind == LedgerEvent::Kind::seed_done);
  CHECK(parsed.seed.question_id == "q3");
  CHECK(parsed.seed.generation_calls == 2);
  CHECK(parsed.seed.verification_calls == 6);
  CHECK(parsed.seed.parse_retries == 1);
  REQUIRE(parsed.seed.candidates.size() == 2);
  CHECK(parsed.seed.candidates[0].record.has_value());
  CHECK(parsed.seed.candidates[0].record->accepted);
  CHECK(parsed.seed.candidates[0].record->total_calls == 4);
  CHECK(parsed.seed.candidates[0].record->stage_results.size() == 3);
  CHECK(parsed.seed.candidates[0].record->stage_results[1].parse_retries == 1);
  CHECK(parsed.seed.candidates[0].raw_text == "<think>t</think>\nanswer");
  CHECK_FALSE(parsed.seed.candidates[1].record.has_value());
  CHECK_FALSE(parsed.seed.candidates[1].text_stored);
  CHECK(parsed.seed.selected == std::vector<int>{0});

  // serialization is deterministic
  CHECK(ledger_event_to_line(parsed) == line);
}

TEST_CASE("run_start and run_complete round-trip") {
  LedgerEvent start;
  start.kind = LedgerEvent::Kind::run_start;
  start.ts = "2026-01-01T00:00:00.000Z";
  start.start = {"curate", 8, 5, VerifierKind::uq, SelectionPolicy::first_valid, 20, 3,
                 "deadbeef"};
  auto parsed = ledger_event_from_line(ledger_event_to_line(start));
  CHECK(parsed.start.mode == "curate");
  CHECK(parsed.start.n == 8);
  CHECK(parsed.start.v == 5);
  CHECK(parsed.start.seed_count == 20);
  CHECK(parsed.start.dropped_answer_fields == 3);

  LedgerEvent complete;
  complete.kind = LedgerEvent::Kind::run_complete;
  complete.ts = "2026-01-01T00:00:01.000Z";
  CHECK(ledger_event_from_line(ledger_event_to_line(complete)).kind ==
        LedgerEvent::Kind::run_complete);
}

TEST_CASE("a torn trailing line is tolerated, an interior one is not") {
  auto dir = std::filesystem::temp_directory_path() / "selfcurate_ledger_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "ledger.jsonl";

  LedgerEvent event;
  event.kind = LedgerEvent::Kind::seed_done;
  event.ts = iso8601_now();
  event.seed = sample_outcome();

  {
    std::ofstream out(path, std::ios::trunc);
    out << ledger_event_to_line(event) << "\n";
    out << ledger_event_to_line(event).substr(0, 40);  // torn tail
  }
  auto events = read_ledger(path);
  CHECK(events.size() == 1);

  {
    std::ofstream out(path, std::ios::trunc);
    out << "{broken json}\n";
    out << ledger_event_to_line(event) << "\n";
  }
  CHECK_THROWS_AS(read_ledger(path), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("replay keeps one terminal outcome per unit and the completion flag") {
  LedgerEvent start;
  start.kind = LedgerEvent::Kind::run_start;
  start.start.mode = "curate";
  LedgerEvent seed;
  seed.kind = LedgerEvent::Kind::seed_done;
  seed.seed = sample_outcome();
  LedgerEvent complete;
  complete.kind = LedgerEvent::Kind::run_complete;

  auto replay = replay_ledger({start, seed});
  CHECK(replay.start.has_value());
  CHECK(replay.completed.count("q3") == 1);
  CHECK_FALSE(replay.run_complete);

  replay = replay_ledger({start, seed, complete});
  CHECK(replay.run_complete);
}

TEST_CASE("stats replay from events equals stats computed at run end") {
  std::mt19937 rng(13001);
  auto table = oracle::VerdictTable::random(rng, 3, 2, 2, VerifierKind::uq, 0.05);
  auto seeds = oracle::make_seeds(3);

  auto dir = std::filesystem::temp_directory_path() / "selfcurate_ledger_replay_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto path = dir / "ledger.jsonl";

  ScriptedBackend backend;
  oracle::script_from_table(backend, table);
  CurationOptions options;
  options.n = 2;
  options.v = 2;
  options.kind = VerifierKind::uq;
  options.policy = SelectionPolicy::first_valid;
  options.retry = {3, 0, 2.0, 0};
  options.dropped_answer_fields = 5;

  RunLedger ledger(path);
  LedgerEvent start;
  start.kind = LedgerEvent::Kind::run_start;
  start.ts = iso8601_now();
  start.start = {"curate", 2, 2, VerifierKind::uq, SelectionPolicy::first_valid, 3, 5, "d"};
  ledger.append(start);

  auto result = curate(seeds, options, backend, &ledger);

  auto events = read_ledger(path);
  StatsReport replayed = stats_from_events(events);
  CHECK(replayed == result.stats);
  std::filesystem::remove_all(dir);
}

TEST_CASE("in-process resume: completed seeds are not reprocessed") {
  std::mt19937 rng(13002);
  auto table = oracle::VerdictTable::random(rng, 4, 2, 1, VerifierKind::uq);
  auto seeds = oracle::make_seeds(4);
  CurationOptions options;
  options.n = 2;
  options.v = 1;
  options.kind = VerifierKind::uq;
  options.policy = SelectionPolicy::all_valid;
  options.retry = {3, 0, 2.0, 0};

  // reference: uninterrupted run
  ScriptedBackend full_backend;
  oracle::script_from_table(full_backend, table);
  auto full = curate(seeds, options, full_backend);

  // simulate a run killed after two seeds: only their outcomes survive
  std::map<std::string, SeedOutcome> completed;
  completed["q0"] = full.outcomes[0];
  completed["q2"] = full.outcomes[2];

  ScriptedBackend resume_backend;
  oracle::script_from_table(resume_backend, table);
  auto resumed = curate(seeds, options, resume_backend, nullptr, &completed);

  CHECK(dataset_to_jsonl(resumed.dataset) == dataset_to_jsonl(full.dataset));
  CHECK(resumed.stats == full.stats);
  // the resumed run only re-issued calls for the two missing seeds
  CHECK(resume_backend.calls_matching([](const InferenceRequest& request) {
          return request.unit_key.question_id == "q0" ||
                 request.unit_key.question_id == "q2";
        }) == 0);
}
