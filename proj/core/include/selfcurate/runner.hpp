#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "selfcurate/config.hpp"
#include "selfcurate/curation.hpp"
#include "selfcurate/ttc.hpp"

namespace selfcurate {

/// Files inside one run directory. One run = one directory holding the
/// config snapshot, ledger, outputs, and the template checksums it ran with.
struct RunPaths {
  std::filesystem::path dir;
  std::filesystem::path config;
  std::filesystem::path ledger;
  std::filesystem::path dataset;
  std::filesystem::path stats_json;
  std::filesystem::path stats_text;
  std::filesystem::path templates_dir;
  std::filesystem::path lock;
  std::filesystem::path ttc_result;
  std::filesystem::path answer;

  static RunPaths in(const std::filesystem::path& dir);
};

/// Pid-file lock marker enforcing one process per run directory. A lock left
/// by a dead process is taken over.
class RunLock {
 public:
  explicit RunLock(std::filesystem::path path);
  ~RunLock();

  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::filesystem::path path_;
};

struct CurateRunResult {
  StatsReport stats;
  int dataset_size = 0;
};

/// End-to-end curation into config.output_dir. Refuses a directory that
/// already has a ledger (use resume for that).
CurateRunResult run_curate(const RunConfig& config, std::ostream& log);

/// Completes an interrupted run: every seed with a terminal ledger event is
/// skipped, the rest are processed, and the final outputs are rewritten.
/// Resuming a completed run is a no-op with a notice.
CurateRunResult run_resume(const std::filesystem::path& run_dir, std::ostream& log);

/// One test-time answer; writes ledger, TtcResult record, and the plain-text
/// answer into config.output_dir.
TtcResult run_ttc(const RunConfig& config, const SeedQuestion& question, std::ostream& log);

/// Ad-hoc cascade inspection for one (question, answer) pair.
VerificationRecord run_verify(const RunConfig& config, const std::string& question,
                              const std::string& answer, std::ostream& log);

/// Recompute the stats report from a run directory's ledger.
StatsReport run_stats(const std::filesystem::path& run_dir);

std::string ttc_result_to_json(const TtcResult& result);
std::string verification_record_to_json(const VerificationRecord& record);

}  // namespace selfcurate
