#pragma once

// Test-only brute-force oracle for the verification cascade. Deliberately
// independent of the pipeline implementation: acceptance is evaluated as a
// plain conjunction over the scripted verdict table, and selection is applied
// directly to the resulting accept flags.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "selfcurate/generation.hpp"
#include "selfcurate/scripted_backend.hpp"
#include "selfcurate/types.hpp"

namespace oracle {

using selfcurate::Stage;
using selfcurate::VerifierKind;

enum class Cell : uint8_t { yes = 0, no = 1, garbage = 2 };

inline std::vector<Stage> table_stages(VerifierKind kind) {
  if (kind == VerifierKind::uq) return {Stage::cycle, Stage::fact, Stage::correctness};
  return {Stage::simple};
}

/// Scripted verdict for every (seed, candidate, stage, vote) cell.
struct VerdictTable {
  int num_seeds = 1;
  int n = 1;
  int v = 1;
  VerifierKind kind = VerifierKind::uq;
  std::vector<Cell> cells;

  int stage_count() const { return kind == VerifierKind::uq ? 3 : 1; }
  int cell_count() const { return num_seeds * n * stage_count() * v; }

  static VerdictTable make(int num_seeds, int n, int v, VerifierKind kind) {
    VerdictTable table{num_seeds, n, v, kind, {}};
    table.cells.assign(size_t(table.cell_count()), Cell::yes);
    return table;
  }

  size_t index(int seed, int candidate, int stage_idx, int vote) const {
    return size_t(((seed * n + candidate) * stage_count() + stage_idx) * v + vote);
  }

  Cell cell(int seed, int candidate, int stage_idx, int vote) const {
    return cells[index(seed, candidate, stage_idx, vote)];
  }

  void set(int seed, int candidate, int stage_idx, int vote, Cell value) {
    cells[index(seed, candidate, stage_idx, vote)] = value;
  }

  /// Yes/no table from the binary expansion of `bits` (for exhaustive sweeps).
  static VerdictTable from_bits(uint64_t bits, int num_seeds, int n, int v,
                                VerifierKind kind) {
    VerdictTable table = make(num_seeds, n, v, kind);
    for (int i = 0; i < table.cell_count(); ++i) {
      table.cells[size_t(i)] = (bits >> i) & 1 ? Cell::yes : Cell::no;
    }
    return table;
  }

  static VerdictTable random(std::mt19937& rng, int num_seeds, int n, int v,
                             VerifierKind kind, double garbage_prob = 0.0) {
    VerdictTable table = make(num_seeds, n, v, kind);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (auto& cell : table.cells) {
      double roll = uniform(rng);
      if (roll < garbage_prob) {
        cell = Cell::garbage;
      } else {
        cell = uniform(rng) < 0.5 ? Cell::yes : Cell::no;
      }
    }
    return table;
  }
};

inline std::string seed_id(int seed) { return "q" + std::to_string(seed); }

inline std::vector<selfcurate::SeedQuestion> make_seeds(int count) {
  std::vector<selfcurate::SeedQuestion> seeds;
  for (int i = 0; i < count; ++i) {
    seeds.push_back({seed_id(i), "What is the value of f(" + std::to_string(i) + ")?",
                     selfcurate::Domain::math});
  }
  return seeds;
}

inline std::string wellformed_completion(int seed, int candidate) {
  return "<think>working through it</think>\nThe value is " + std::to_string(seed) + "." +
         std::to_string(candidate) + ".";
}

/// Builds the mock script realizing a verdict table: wellformed generations,
/// a fixed inferred question, and one judge rule per table cell.
inline void script_from_table(selfcurate::ScriptedBackend& backend,
                              const VerdictTable& table) {
  const auto stages = table_stages(table.kind);
  for (int s = 0; s < table.num_seeds; ++s) {
    for (int c = 0; c < table.n; ++c) {
      backend.on_generate(seed_id(s), c, wellformed_completion(s, c));
      for (int stage_idx = 0; stage_idx < int(stages.size()); ++stage_idx) {
        for (int vote = 0; vote < table.v; ++vote) {
          const char* response = nullptr;
          switch (table.cell(s, c, stage_idx, vote)) {
            case Cell::yes: response = "[[Y]]"; break;
            case Cell::no: response = "[[N]]"; break;
            case Cell::garbage: response = "no verdict marker in this reply"; break;
          }
          backend.on_judge(seed_id(s), c, stages[size_t(stage_idx)], vote, response);
        }
      }
    }
  }
  backend.on_infer_all("What is f evaluated at the given point?");
}

/// Ground truth, straight off the table: accepted iff every configured
/// (stage, vote) cell is yes. Garbage counts as not-yes (a re-read of the
/// same cell cannot turn it into a yes).
inline bool oracle_accept(const VerdictTable& table, int seed, int candidate, int v) {
  for (int stage_idx = 0; stage_idx < table.stage_count(); ++stage_idx) {
    for (int vote = 0; vote < v; ++vote) {
      if (table.cell(seed, candidate, stage_idx, vote) != Cell::yes) return false;
    }
  }
  return true;
}

inline bool oracle_accept(const VerdictTable& table, int seed, int candidate) {
  return oracle_accept(table, seed, candidate, table.v);
}

inline std::vector<int> oracle_select(const std::vector<bool>& accept_flags,
                                      selfcurate::SelectionPolicy policy) {
  std::vector<int> selected;
  for (int i = 0; i < int(accept_flags.size()); ++i) {
    if (!accept_flags[size_t(i)]) continue;
    selected.push_back(i);
    if (policy == selfcurate::SelectionPolicy::first_valid) break;
  }
  return selected;
}

}  // namespace oracle
