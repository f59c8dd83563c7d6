#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "selfcurate/backend.hpp"
#include "selfcurate/generation.hpp"
#include "selfcurate/ledger.hpp"
#include "selfcurate/prompts.hpp"
#include "selfcurate/types.hpp"
#include "selfcurate/verifier.hpp"

namespace selfcurate {

enum class SolutionField { raw, answer };

struct CuratedExample {
  std::string question_id;
  std::string question;
  std::string solution;
  int candidate_index = 0;
  VerifierKind verifier_kind = VerifierKind::uq;
  int n = 0;
  int v = 0;
  SelectionPolicy policy = SelectionPolicy::first_valid;
};

struct StatsReport {
  int seeds_processed = 0;
  int seed_errors = 0;
  int candidates_sampled = 0;
  int malformed_count = 0;
  std::map<std::string, int> rejected_by_stage;  // first failed stage, by name
  int verification_errors = 0;
  int accepted_count = 0;
  double acceptance_rate = 0.0;  // accepted / (sampled - malformed)
  long long total_inference_calls = 0;
  long long generation_calls = 0;
  long long verification_calls = 0;
  int parse_retries = 0;
  int dataset_size = 0;
  int seeds_with_accept = 0;
  int dropped_answer_fields = 0;

  bool operator==(const StatsReport&) const = default;
};

struct CurationOptions {
  int n = 1;
  int v = 1;
  VerifierKind kind = VerifierKind::uq;
  SelectionPolicy policy = SelectionPolicy::first_valid;
  bool short_circuit = true;
  SolutionField solution_field = SolutionField::raw;  // full trace by default
  SamplingParams params;
  RetryPolicy retry;
  ReasoningMarkers markers;
  const PromptTemplates* templates = &PromptTemplates::builtin();
  int max_concurrency = 1;
  int dropped_answer_fields = 0;  // reported by seed ingestion
  std::function<void(const SeedOutcome&)> progress;  // optional, called per seed
};

struct CurateResult {
  std::vector<CuratedExample> dataset;
  StatsReport stats;
  std::vector<SeedOutcome> outcomes;  // input seed order
};

/// Selected candidate indices for one seed. first_valid keeps the lowest
/// accepted index, all_valid keeps every accepted index in order.
std::vector<int> select(const std::vector<VerificationRecord>& records,
                        SelectionPolicy policy);

/// Worst-case inference calls per seed question: n + 4*v*n for the uq
/// cascade (a cycle vote costs two calls), n + v*n for the simple verifier.
long long max_calls(int n, int v, VerifierKind kind);

/// Generate, filter, verify, and select one seed.
SeedOutcome process_seed(const SeedQuestion& seed, const CurationOptions& options,
                         Backend& backend);

/// Full loop over all seeds with a bounded worker pool. Seeds present in
/// `resume_completed` are taken as-is and not reprocessed; new terminal
/// events are appended to `ledger` when it is non-null. Per-seed failures
/// are recorded and skipped; only ledger I/O failures abort the run.
CurateResult curate(const std::vector<SeedQuestion>& seeds, const CurationOptions& options,
                    Backend& backend, RunLedger* ledger = nullptr,
                    const std::map<std::string, SeedOutcome>* resume_completed = nullptr);

/// Dataset assembly from terminal outcomes, deterministic in seed input
/// order regardless of worker completion order.
std::vector<CuratedExample> build_dataset(const std::vector<SeedQuestion>& seeds,
                                          const std::vector<SeedOutcome>& outcomes,
                                          const CurationOptions& options);

std::string dataset_to_jsonl(const std::vector<CuratedExample>& dataset);
void emit_dataset(const std::vector<CuratedExample>& dataset,
                  const std::filesystem::path& path);

std::string stats_to_json(const StatsReport& stats);
std::string stats_to_text(const StatsReport& stats);
StatsReport stats_from_json(const std::string& text);
void emit_stats(const StatsReport& stats, const std::filesystem::path& json_path,
                const std::filesystem::path& text_path);

/// Replay: identical to the report computed at run end, by construction.
StatsReport stats_from_outcomes(const std::vector<SeedOutcome>& outcomes,
                                int dropped_answer_fields);
StatsReport stats_from_events(const std::vector<LedgerEvent>& events);

}  // namespace selfcurate
