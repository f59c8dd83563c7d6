#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "selfcurate/types.hpp"
#include "selfcurate/verifier.hpp"

namespace selfcurate {

/// Per-candidate slice of a terminal ledger event. Texts are stored only for
/// candidates a resumed run must reproduce (selected / chosen); everyone else
/// keeps a digest.
struct CandidateOutcome {
  int index = 0;
  bool wellformed = false;
  FinishReason finish_reason = FinishReason::error;
  std::string error;
  std::string text_digest;  // sha256 of raw_text
  std::optional<VerificationRecord> record;
  bool text_stored = false;
  std::string raw_text;
  std::string solution_text;
};

/// Terminal event for one work unit (a seed question). Replayable: stats are
/// reconstructed from these events alone.
struct SeedOutcome {
  std::string question_id;
  std::string outcome = "ok";  // ok | error
  std::string error;
  int generation_calls = 0;
  int verification_calls = 0;
  int parse_retries = 0;
  std::vector<CandidateOutcome> candidates;
  std::vector<int> selected;  // candidate indices chosen by the selection policy

  int total_calls() const { return generation_calls + verification_calls; }
};

struct TtcInfo {
  int chosen_index = -1;
  bool accepted = false;
  bool chosen_wellformed = false;
  int candidates_tried = 0;
};

struct RunStartInfo {
  std::string mode;  // curate | ttc
  int n = 0;
  int v = 0;
  VerifierKind kind = VerifierKind::uq;
  SelectionPolicy policy = SelectionPolicy::first_valid;
  int seed_count = 0;
  int dropped_answer_fields = 0;
  std::string config_digest;
};

struct LedgerEvent {
  enum class Kind { run_start, seed_done, ttc_done, run_complete };

  Kind kind = Kind::run_start;
  std::string ts;
  RunStartInfo start;  // run_start only
  SeedOutcome seed;    // seed_done / ttc_done
  TtcInfo ttc;         // ttc_done only
};

std::string ledger_event_to_line(const LedgerEvent& event);
LedgerEvent ledger_event_from_line(const std::string& line);

/// Append-only event log. Appends are serialized and flushed per line.
class RunLedger {
 public:
  explicit RunLedger(const std::filesystem::path& path);

  void append(const LedgerEvent& event);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::mutex mutex_;
};

/// Reads a ledger, tolerating one torn trailing line from a killed run.
std::vector<LedgerEvent> read_ledger(const std::filesystem::path& path);

/// Resume view: terminal outcomes keyed by question id, in event order.
struct LedgerReplay {
  std::optional<RunStartInfo> start;
  std::map<std::string, SeedOutcome> completed;
  std::map<std::string, TtcInfo> ttc_info;
  bool run_complete = false;
};

LedgerReplay replay_ledger(const std::vector<LedgerEvent>& events);

}  // namespace selfcurate
