#include "selfcurate/curation.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selfcurate/util.hpp"

namespace selfcurate {

using ojson = nlohmann::ordered_json;

std::vector<int> select(const std::vector<VerificationRecord>& records,
                        SelectionPolicy policy) {
  std::vector<int> selected;
  for (const VerificationRecord& record : records) {
    if (!record.accepted) continue;
    selected.push_back(record.candidate_index);
    if (policy == SelectionPolicy::first_valid) break;
  }
  return selected;
}

long long max_calls(int n, int v, VerifierKind kind) {
  if (n < 1 || v < 1) throw std::invalid_argument("max_calls: n and v must be >= 1");
  long long calls_per_vote = kind == VerifierKind::uq ? 4 : 1;
  return (long long)n + (long long)n * calls_per_vote * v;
}

SeedOutcome process_seed(const SeedQuestion& seed, const CurationOptions& options,
                         Backend& backend) {
  SeedOutcome outcome;
  outcome.question_id = seed.id;

  auto candidates =
      sample_candidates(seed, options.n, options.params, backend, options.retry,
                        options.markers);
  outcome.generation_calls = options.n;

  VerifyOptions verify_options;
  verify_options.v = options.v;
  verify_options.kind = options.kind;
  verify_options.short_circuit = options.short_circuit;
  verify_options.params = options.params;
  verify_options.retry = options.retry;
  verify_options.markers = options.markers;
  verify_options.templates = options.templates;

  std::vector<VerificationRecord> records;
  for (const Candidate& candidate : candidates) {
    CandidateOutcome co;
    co.index = candidate.index;
    co.wellformed = candidate.wellformed;
    co.finish_reason = candidate.finish_reason;
    co.error = candidate.error;
    co.text_digest = sha256_hex(candidate.raw_text);
    if (candidate.wellformed) {
      VerificationRecord record = verify_candidate(seed, candidate, backend, verify_options);
      outcome.verification_calls += record.total_calls;
      for (const StageResult& sr : record.stage_results) {
        outcome.parse_retries += sr.parse_retries;
      }
      co.record = record;
      records.push_back(std::move(record));
    }
    outcome.candidates.push_back(std::move(co));
  }

  outcome.selected = select(records, options.policy);
  for (int index : outcome.selected) {
    CandidateOutcome& co = outcome.candidates.at(size_t(index));
    co.text_stored = true;
    co.raw_text = candidates.at(size_t(index)).raw_text;
    co.solution_text = candidates.at(size_t(index)).solution_text;
  }
  return outcome;
}

CurateResult curate(const std::vector<SeedQuestion>& seeds, const CurationOptions& options,
                    Backend& backend, RunLedger* ledger,
                    const std::map<std::string, SeedOutcome>* resume_completed) {
  if (seeds.empty()) throw std::invalid_argument("curate: seeds must be non-empty");
  if (options.n < 1 || options.v < 1) {
    throw std::invalid_argument("curate: n and v must be >= 1");
  }

  std::vector<SeedOutcome> outcomes(seeds.size());
  std::mutex abort_mutex;
  std::string abort_message;

  {
    WorkerPool pool(options.max_concurrency);
    for (size_t i = 0; i < seeds.size(); ++i) {
      const SeedQuestion& seed = seeds[i];
      if (resume_completed) {
        auto it = resume_completed->find(seed.id);
        if (it != resume_completed->end()) {
          outcomes[i] = it->second;
          continue;
        }
      }
      pool.submit([&, i] {
        {
          std::lock_guard lock(abort_mutex);
          if (!abort_message.empty()) return;
        }
        SeedOutcome outcome;
        try {
          outcome = process_seed(seeds[i], options, backend);
        } catch (const std::exception& e) {
          outcome.question_id = seeds[i].id;
          outcome.outcome = "error";
          outcome.error = e.what();
          outcome.candidates.clear();
        }
        outcomes[i] = outcome;
        if (ledger) {
          LedgerEvent event;
          event.kind = LedgerEvent::Kind::seed_done;
          event.ts = iso8601_now();
          event.seed = outcome;
          try {
            ledger->append(event);
          } catch (const std::exception& e) {
            std::lock_guard lock(abort_mutex);
            if (abort_message.empty()) abort_message = e.what();
            return;
          }
        }
        if (options.progress) options.progress(outcome);
      });
    }
    pool.wait_idle();
  }

  if (!abort_message.empty()) {
    throw IoError(abort_message);
  }

  CurateResult result;
  result.dataset = build_dataset(seeds, outcomes, options);
  result.stats = stats_from_outcomes(outcomes, options.dropped_answer_fields);
  result.outcomes = std::move(outcomes);
  return result;
}

std::vector<CuratedExample> build_dataset(const std::vector<SeedQuestion>& seeds,
                                          const std::vector<SeedOutcome>& outcomes,
                                          const CurationOptions& options) {
  std::vector<CuratedExample> dataset;
  for (size_t i = 0; i < seeds.size() && i < outcomes.size(); ++i) {
    const SeedOutcome& outcome = outcomes[i];
    if (outcome.outcome != "ok") continue;
    for (int index : outcome.selected) {
      auto it = std::find_if(outcome.candidates.begin(), outcome.candidates.end(),
                             [&](const CandidateOutcome& c) { return c.index == index; });
      if (it == outcome.candidates.end() || !it->text_stored) {
        throw IoError("selected candidate " + std::to_string(index) + " of seed '" +
                      outcome.question_id + "' has no stored text");
      }
      CuratedExample example;
      example.question_id = seeds[i].id;
      example.question = seeds[i].question;
      example.solution =
          options.solution_field == SolutionField::raw ? it->raw_text : it->solution_text;
      example.candidate_index = index;
      example.verifier_kind = options.kind;
      example.n = options.n;
      example.v = options.v;
      example.policy = options.policy;
      dataset.push_back(std::move(example));
    }
  }
  return dataset;
}

std::string dataset_to_jsonl(const std::vector<CuratedExample>& dataset) {
  std::ostringstream out;
  for (const CuratedExample& example : dataset) {
    ojson j = {
        {"question", example.question},
        {"solution", example.solution},
        {"meta",
         {
             {"question_id", example.question_id},
             {"candidate_index", example.candidate_index},
             {"n", example.n},
             {"v", example.v},
             {"verifier", std::string(to_string(example.verifier_kind))},
             {"policy", std::string(to_string(example.policy))},
         }},
    };
    out << j.dump() << '\n';
  }
  return out.str();
}

void emit_dataset(const std::vector<CuratedExample>& dataset,
                  const std::filesystem::path& path) {
  atomic_write_file(path, dataset_to_jsonl(dataset));
}

StatsReport stats_from_outcomes(const std::vector<SeedOutcome>& outcomes,
                                int dropped_answer_fields) {
  StatsReport stats;
  stats.dropped_answer_fields = dropped_answer_fields;
  for (Stage stage : {Stage::cycle, Stage::fact, Stage::correctness, Stage::simple}) {
    stats.rejected_by_stage[std::string(to_string(stage))] = 0;
  }
  for (const SeedOutcome& outcome : outcomes) {
    if (outcome.question_id.empty()) continue;  // unprocessed slot
    ++stats.seeds_processed;
    if (outcome.outcome != "ok") {
      ++stats.seed_errors;
      continue;
    }
    stats.generation_calls += outcome.generation_calls;
    stats.verification_calls += outcome.verification_calls;
    stats.parse_retries += outcome.parse_retries;
    bool any_accept = false;
    for (const CandidateOutcome& candidate : outcome.candidates) {
      ++stats.candidates_sampled;
      if (!candidate.wellformed) {
        ++stats.malformed_count;
        continue;
      }
      if (!candidate.record) continue;
      if (candidate.record->accepted) {
        ++stats.accepted_count;
        any_accept = true;
      } else {
        // attribute the rejection to the first failed stage
        for (const StageResult& sr : candidate.record->stage_results) {
          if (!sr.passed) {
            ++stats.rejected_by_stage[std::string(to_string(sr.stage))];
            if (!sr.error.empty()) ++stats.verification_errors;
            break;
          }
        }
      }
    }
    if (any_accept) ++stats.seeds_with_accept;
    stats.dataset_size += int(outcome.selected.size());
  }
  stats.total_inference_calls = stats.generation_calls + stats.verification_calls;
  int verified = stats.candidates_sampled - stats.malformed_count;
  stats.acceptance_rate = verified > 0 ? double(stats.accepted_count) / verified : 0.0;
  return stats;
}

StatsReport stats_from_events(const std::vector<LedgerEvent>& events) {
  std::vector<SeedOutcome> outcomes;
  int dropped = 0;
  LedgerReplay replay = replay_ledger(events);
  if (replay.start) dropped = replay.start->dropped_answer_fields;
  for (const auto& [id, outcome] : replay.completed) {
    outcomes.push_back(outcome);
  }
  return stats_from_outcomes(outcomes, dropped);
}

std::string stats_to_json(const StatsReport& stats) {
  ojson j = {
      {"seeds_processed", stats.seeds_processed},
      {"seed_errors", stats.seed_errors},
      {"candidates_sampled", stats.candidates_sampled},
      {"malformed_count", stats.malformed_count},
      {"rejected_by_stage", stats.rejected_by_stage},
      {"verification_errors", stats.verification_errors},
      {"accepted_count", stats.accepted_count},
      {"acceptance_rate", stats.acceptance_rate},
      {"total_inference_calls", stats.total_inference_calls},
      {"generation_calls", stats.generation_calls},
      {"verification_calls", stats.verification_calls},
      {"parse_retries", stats.parse_retries},
      {"dataset_size", stats.dataset_size},
      {"seeds_with_accept", stats.seeds_with_accept},
      {"dropped_answer_fields", stats.dropped_answer_fields},
  };
  return j.dump(2) + "\n";
}

StatsReport stats_from_json(const std::string& text) {
  ojson j = ojson::parse(text);
  StatsReport stats;
  stats.seeds_processed = j.at("seeds_processed").get<int>();
  stats.seed_errors = j.value("seed_errors", 0);
  stats.candidates_sampled = j.at("candidates_sampled").get<int>();
  stats.malformed_count = j.at("malformed_count").get<int>();
  stats.rejected_by_stage = j.at("rejected_by_stage").get<std::map<std::string, int>>();
  stats.verification_errors = j.value("verification_errors", 0);
  stats.accepted_count = j.at("accepted_count").get<int>();
  stats.acceptance_rate = j.at("acceptance_rate").get<double>();
  stats.total_inference_calls = j.at("total_inference_calls").get<long long>();
  stats.generation_calls = j.value("generation_calls", 0LL);
  stats.verification_calls = j.value("verification_calls", 0LL);
  stats.parse_retries = j.value("parse_retries", 0);
  stats.dataset_size = j.at("dataset_size").get<int>();
  stats.seeds_with_accept = j.value("seeds_with_accept", 0);
  stats.dropped_answer_fields = j.value("dropped_answer_fields", 0);
  return stats;
}

std::string stats_to_text(const StatsReport& stats) {
  std::ostringstream out;
  out << "run summary\n";
  out << "  seeds processed:       " << stats.seeds_processed << " (errors: " << stats.seed_errors
      << ")\n";
  out << "  candidates sampled:    " << stats.candidates_sampled << "\n";
  out << "  malformed:             " << stats.malformed_count << "\n";
  out << "  accepted:              " << stats.accepted_count << " (acceptance rate "
      << stats.acceptance_rate << ")\n";
  out << "  rejected by stage:    ";
  for (const auto& [stage, count] : stats.rejected_by_stage) {
    out << " " << stage << "=" << count;
  }
  out << "\n";
  out << "  verification errors:   " << stats.verification_errors << "\n";
  out << "  parse retries:         " << stats.parse_retries << "\n";
  out << "  inference calls:       " << stats.total_inference_calls << " (generation "
      << stats.generation_calls << ", verification " << stats.verification_calls << ")\n";
  out << "  dataset size:          " << stats.dataset_size << "\n";
  out << "  seeds with accept:     " << stats.seeds_with_accept << "\n";
  out << "  dropped answer fields: " << stats.dropped_answer_fields << "\n";
  return out.str();
}

void emit_stats(const StatsReport& stats, const std::filesystem::path& json_path,
                const std::filesystem::path& text_path) {
  atomic_write_file(json_path, stats_to_json(stats));
  atomic_write_file(text_path, stats_to_text(stats));
}

}  // namespace selfcurate
