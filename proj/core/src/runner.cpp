#include "selfcurate/runner.hpp"

#include <csignal>
#include <mutex>
#include <sstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "json_detail.hpp"
#include "selfcurate/util.hpp"

namespace selfcurate {

using ojson = nlohmann::ordered_json;

RunPaths RunPaths::in(const std::filesystem::path& dir) {
  RunPaths paths;
  paths.dir = dir;
  paths.config = dir / "config.json";
  paths.ledger = dir / "ledger.jsonl";
  paths.dataset = dir / "dataset.jsonl";
  paths.stats_json = dir / "stats.json";
  paths.stats_text = dir / "stats.txt";
  paths.templates_dir = dir / "templates";
  paths.lock = dir / ".lock";
  paths.ttc_result = dir / "ttc_result.json";
  paths.answer = dir / "answer.txt";
  return paths;
}

RunLock::RunLock(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    long pid = 0;
    try {
      pid = std::stol(trim(read_file(path_)));
    } catch (...) {
      pid = 0;
    }
    if (pid > 0 && ::kill(pid_t(pid), 0) == 0) {
      throw ConfigError("run directory is locked by running process " + std::to_string(pid) +
                        " (" + path_.string() + ")");
    }
    // Stale lock from a dead process: take it over.
  }
  atomic_write_file(path_, std::to_string(long(::getpid())) + "\n");
}

RunLock::~RunLock() {
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

namespace {

void throw_if_invalid(const RunConfig& config, bool need_seed_file, bool need_output_dir) {
  auto errors = validate_config(config, need_seed_file, need_output_dir);
  if (errors.empty()) return;
  std::string message = "invalid configuration:";
  for (const std::string& e : errors) message += "\n  " + e;
  throw ConfigError(message);
}

PromptTemplates resolve_templates(const RunConfig& config) {
  if (config.template_dir.empty()) {
    return PromptTemplates::builtin();
  }
  if (std::filesystem::exists(std::filesystem::path(config.template_dir) /
                              "manifest.sha256")) {
    PromptTemplates::verify_manifest(config.template_dir);
  }
  return PromptTemplates::load_dir(config.template_dir);
}

CurationOptions curation_options(const RunConfig& config, const PromptTemplates& templates,
                                 int dropped_answer_fields) {
  CurationOptions options;
  options.n = config.n;
  options.v = config.v;
  options.kind = config.verifier;
  options.policy = config.policy;
  options.short_circuit = config.short_circuit;
  options.solution_field = config.solution_field;
  options.params = config.sampling;
  options.retry = config.retry;
  options.markers = config.markers;
  options.templates = &templates;
  options.max_concurrency = config.max_concurrency;
  options.dropped_answer_fields = dropped_answer_fields;
  return options;
}

RunConfig snapshot_config(const RunConfig& config) {
  RunConfig snapshot = config;
  if (!snapshot.seed_file.empty()) {
    snapshot.seed_file = std::filesystem::absolute(snapshot.seed_file).string();
  }
  if (!snapshot.output_dir.empty()) {
    snapshot.output_dir = std::filesystem::absolute(snapshot.output_dir).string();
  }
  if (!snapshot.backend.script_file.empty()) {
    snapshot.backend.script_file =
        std::filesystem::absolute(snapshot.backend.script_file).string();
  }
  return snapshot;
}

LedgerEvent run_start_event(const std::string& mode, const RunConfig& config, int seed_count,
                            int dropped_answer_fields, const std::string& config_digest) {
  LedgerEvent event;
  event.kind = LedgerEvent::Kind::run_start;
  event.ts = iso8601_now();
  event.start.mode = mode;
  event.start.n = config.n;
  event.start.v = config.v;
  event.start.kind = config.verifier;
  event.start.policy = config.policy;
  event.start.seed_count = seed_count;
  event.start.dropped_answer_fields = dropped_answer_fields;
  event.start.config_digest = config_digest;
  return event;
}

LedgerEvent run_complete_event() {
  LedgerEvent event;
  event.kind = LedgerEvent::Kind::run_complete;
  event.ts = iso8601_now();
  return event;
}

CurateRunResult finish_run(const CurateResult& result, const RunPaths& paths,
                           RunLedger& ledger, std::ostream& log) {
  emit_dataset(result.dataset, paths.dataset);
  emit_stats(result.stats, paths.stats_json, paths.stats_text);
  ledger.append(run_complete_event());
  log << stats_to_text(result.stats);
  log << "dataset: " << paths.dataset.string() << " (" << result.dataset.size()
      << " examples)\n";
  return {result.stats, int(result.dataset.size())};
}

}  // namespace

CurateRunResult run_curate(const RunConfig& config, std::ostream& log) {
  throw_if_invalid(config, /*need_seed_file=*/true, /*need_output_dir=*/true);

  SeedLoadResult seeds = load_seed_file(config.seed_file);
  if (seeds.seeds.empty()) {
    throw ConfigError("field 'seed_file': contains no seed questions");
  }

  RunPaths paths = RunPaths::in(config.output_dir);
  std::filesystem::create_directories(paths.dir);
  if (std::filesystem::exists(paths.ledger)) {
    throw ConfigError("run directory already contains a ledger: " + paths.ledger.string() +
                      " (use 'resume' to continue it)");
  }

  RunLock lock(paths.lock);
  PromptTemplates templates = resolve_templates(config);
  templates.write_dir(paths.templates_dir);
  std::string config_json = config_to_json(snapshot_config(config));
  atomic_write_file(paths.config, config_json);

  auto backend = make_backend(config);
  ThrottledBackend throttled(*backend, config.max_concurrency);
  RunLedger ledger(paths.ledger);
  ledger.append(run_start_event("curate", config, int(seeds.seeds.size()),
                                seeds.dropped_answer_fields, sha256_hex(config_json)));

  std::mutex log_mutex;
  CurationOptions options =
      curation_options(config, templates, seeds.dropped_answer_fields);
  options.progress = [&](const SeedOutcome& outcome) {
    std::lock_guard guard(log_mutex);
    log << "seed " << outcome.question_id << ": " << outcome.outcome << " calls="
        << outcome.total_calls() << " selected=" << outcome.selected.size() << "\n";
  };

  CurateResult result = curate(seeds.seeds, options, throttled, &ledger, nullptr);
  return finish_run(result, paths, ledger, log);
}

CurateRunResult run_resume(const std::filesystem::path& run_dir, std::ostream& log) {
  RunPaths paths = RunPaths::in(run_dir);
  if (!std::filesystem::exists(paths.config)) {
    throw ConfigError("resume: no config snapshot at " + paths.config.string());
  }
  if (!std::filesystem::exists(paths.ledger)) {
    throw ConfigError("resume: no ledger at " + paths.ledger.string());
  }
  RunConfig config = load_config(paths.config);
  throw_if_invalid(config, /*need_seed_file=*/true, /*need_output_dir=*/true);

  auto events = read_ledger(paths.ledger);
  LedgerReplay replay = replay_ledger(events);
  if (replay.run_complete) {
    log << "run already complete; nothing to resume\n";
    StatsReport stats = stats_from_events(events);
    return {stats, stats.dataset_size};
  }

  SeedLoadResult seeds = load_seed_file(config.seed_file);
  if (seeds.seeds.empty()) {
    throw ConfigError("field 'seed_file': contains no seed questions");
  }

  RunLock lock(paths.lock);
  PromptTemplates templates = std::filesystem::exists(paths.templates_dir / "manifest.sha256")
                                  ? PromptTemplates::load_dir(paths.templates_dir)
                                  : resolve_templates(config);
  if (std::filesystem::exists(paths.templates_dir / "manifest.sha256")) {
    PromptTemplates::verify_manifest(paths.templates_dir);
  }

  auto backend = make_backend(config);
  ThrottledBackend throttled(*backend, config.max_concurrency);
  RunLedger ledger(paths.ledger);

  int dropped = replay.start ? replay.start->dropped_answer_fields
                             : seeds.dropped_answer_fields;
  if (!replay.start) {
    ledger.append(run_start_event("curate", config, int(seeds.seeds.size()), dropped,
                                  sha256_hex(read_file(paths.config))));
  }

  log << "resuming: " << replay.completed.size() << " of " << seeds.seeds.size()
      << " seeds already done\n";

  std::mutex log_mutex;
  CurationOptions options = curation_options(config, templates, dropped);
  options.progress = [&](const SeedOutcome& outcome) {
    std::lock_guard guard(log_mutex);
    log << "seed " << outcome.question_id << ": " << outcome.outcome << " calls="
        << outcome.total_calls() << " selected=" << outcome.selected.size() << "\n";
  };

  CurateResult result = curate(seeds.seeds, options, throttled, &ledger, &replay.completed);
  return finish_run(result, paths, ledger, log);
}

TtcResult run_ttc(const RunConfig& config, const SeedQuestion& question, std::ostream& log) {
  throw_if_invalid(config, /*need_seed_file=*/false, /*need_output_dir=*/true);

  RunPaths paths = RunPaths::in(config.output_dir);
  std::filesystem::create_directories(paths.dir);
  if (std::filesystem::exists(paths.ledger)) {
    throw ConfigError("run directory already contains a ledger: " + paths.ledger.string());
  }

  RunLock lock(paths.lock);
  PromptTemplates templates = resolve_templates(config);
  templates.write_dir(paths.templates_dir);
  std::string config_json = config_to_json(snapshot_config(config));
  atomic_write_file(paths.config, config_json);

  auto backend = make_backend(config);
  ThrottledBackend throttled(*backend, config.max_concurrency);
  RunLedger ledger(paths.ledger);
  ledger.append(run_start_event("ttc", config, 1, 0, sha256_hex(config_json)));

  TtcOptions options;
  options.n = config.n;
  options.v = config.v;
  options.kind = config.verifier;
  options.short_circuit = config.short_circuit;
  options.params = config.sampling;
  options.retry = config.retry;
  options.markers = config.markers;
  options.templates = &templates;

  TtcResult result = answer_with_ttc(question, options, throttled);

  LedgerEvent event;
  event.kind = LedgerEvent::Kind::ttc_done;
  event.ts = iso8601_now();
  event.seed = ttc_to_outcome(result);
  event.ttc = ttc_to_info(result);
  ledger.append(event);
  ledger.append(run_complete_event());

  atomic_write_file(paths.ttc_result, ttc_result_to_json(result));
  atomic_write_file(paths.answer, result.chosen_text + "\n");

  log << "question " << result.question_id << ": "
      << (result.accepted ? "accepted" : "fallback") << " candidate "
      << result.chosen_candidate_index << ", " << result.candidates_tried
      << " candidate(s) tried, " << result.total_calls << " calls\n";
  return result;
}

VerificationRecord run_verify(const RunConfig& config, const std::string& question,
                              const std::string& answer, std::ostream& log) {
  throw_if_invalid(config, /*need_seed_file=*/false, /*need_output_dir=*/false);
  if (trim(question).empty()) throw ConfigError("field 'question': must be non-empty");
  if (trim(answer).empty()) throw ConfigError("field 'answer': must be non-empty");

  SeedQuestion seed{"adhoc", question, Domain::other};
  Candidate candidate;
  candidate.question_id = seed.id;
  candidate.index = 0;
  candidate.raw_text = answer;
  candidate.solution_text = strip_reasoning(answer, config.markers);
  candidate.finish_reason = FinishReason::stop;
  candidate.wellformed = !candidate.solution_text.empty();
  if (!candidate.wellformed) {
    throw ConfigError("field 'answer': empty after reasoning-marker stripping");
  }

  PromptTemplates templates = resolve_templates(config);
  auto backend = make_backend(config);
  ThrottledBackend throttled(*backend, config.max_concurrency);

  VerifyOptions options;
  options.v = config.v;
  options.kind = config.verifier;
  options.short_circuit = config.short_circuit;
  options.params = config.sampling;
  options.retry = config.retry;
  options.markers = config.markers;
  options.templates = &templates;

  VerificationRecord record = verify_candidate(seed, candidate, throttled, options);
  for (const StageResult& sr : record.stage_results) {
    log << "stage " << to_string(sr.stage) << ": " << (sr.passed ? "passed" : "failed")
        << " votes=[";
    for (size_t i = 0; i < sr.votes.size(); ++i) {
      if (i) log << ",";
      log << to_string(sr.votes[i]);
    }
    log << "] calls=" << sr.calls_used;
    if (!sr.error.empty()) log << " error=" << sr.error;
    log << "\n";
  }
  log << "accepted=" << (record.accepted ? "true" : "false")
      << " total_calls=" << record.total_calls << "\n";
  return record;
}

StatsReport run_stats(const std::filesystem::path& run_dir) {
  RunPaths paths = RunPaths::in(run_dir);
  return stats_from_events(read_ledger(paths.ledger));
}

std::string ttc_result_to_json(const TtcResult& result) {
  ojson records = ojson::array();
  for (const VerificationRecord& record : result.records) {
    ojson j = detail::record_to_json(record);
    j["candidate_index"] = record.candidate_index;
    records.push_back(std::move(j));
  }
  ojson j = {
      {"question_id", result.question_id},
      {"chosen_candidate_index", result.chosen_candidate_index},
      {"accepted", result.accepted},
      {"chosen_wellformed", result.chosen_wellformed},
      {"candidates_tried", result.candidates_tried},
      {"total_calls", result.total_calls},
      {"answer", result.chosen_text},
      {"records", std::move(records)},
  };
  return j.dump(2) + "\n";
}

std::string verification_record_to_json(const VerificationRecord& record) {
  ojson j = detail::record_to_json(record);
  j["question_id"] = record.question_id;
  j["candidate_index"] = record.candidate_index;
  return j.dump(2) + "\n";
}

}  // namespace selfcurate
