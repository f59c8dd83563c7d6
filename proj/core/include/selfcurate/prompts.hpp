#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace selfcurate {

/// The five judge prompt templates. Placeholders are single-brace named
/// slots; substitution is one pass over the template text, so values are
/// inserted verbatim and never re-expanded.
struct PromptTemplates {
  std::string cycle_infer;    // {answer}
  std::string cycle_compare;  // {original_question}, {inferred_question}
  std::string fact;           // {question}, {answer}
  std::string correctness;    // {question}, {answer}
  std::string simple;         // {question}, {answer}

  static const PromptTemplates& builtin();

  /// Read the five template files from a directory.
  static PromptTemplates load_dir(const std::filesystem::path& dir);

  /// Write the five files plus manifest.sha256 into a directory.
  void write_dir(const std::filesystem::path& dir) const;

  /// sha256sum-style manifest text for the five templates.
  std::string manifest() const;

  /// Recompute checksums under `dir` and compare with its manifest.sha256.
  static void verify_manifest(const std::filesystem::path& dir);
};

std::string render_cycle_infer_prompt(const PromptTemplates& templates,
                                      std::string_view answer);
std::string render_cycle_compare_prompt(const PromptTemplates& templates,
                                        std::string_view original_question,
                                        std::string_view inferred_question);
std::string render_fact_prompt(const PromptTemplates& templates, std::string_view question,
                               std::string_view answer);
std::string render_correctness_prompt(const PromptTemplates& templates,
                                      std::string_view question, std::string_view answer);
std::string render_simple_prompt(const PromptTemplates& templates, std::string_view question,
                                 std::string_view answer);

}  // namespace selfcurate
