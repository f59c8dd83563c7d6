// selfcurate CLI: curate an SFT dataset from unlabeled seed questions, or run
// the same generate-verify loop as a test-time answering mode.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "selfcurate/config.hpp"
#include "selfcurate/runner.hpp"
#include "selfcurate/util.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
  std::string config_path;
  std::optional<int> n;
  std::optional<int> v;
  std::optional<std::string> verifier;
  std::optional<std::string> policy;
  std::optional<std::string> seed_file;
  std::optional<std::string> output_dir;
  std::optional<int> max_concurrency;
  std::optional<bool> short_circuit;
  std::optional<std::string> solution_field;
  std::optional<double> temperature;
  std::optional<double> top_p;
  std::optional<int> max_output_tokens;
  std::optional<std::string> template_dir;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "Run configuration file (JSON)")
      ->required();
  cmd->add_option("--n", flags.n, "Candidate generations per seed question");
  cmd->add_option("--v", flags.v, "Repeated judge calls per verification stage");
  cmd->add_option("--verifier", flags.verifier, "Verifier kind: uq or simple");
  cmd->add_option("--policy", flags.policy, "Selection policy: first_valid or all_valid");
  cmd->add_option("--seed-file", flags.seed_file, "Seed question file (JSONL)");
  cmd->add_option("--output-dir", flags.output_dir, "Run directory");
  cmd->add_option("--max-concurrency", flags.max_concurrency, "Bounded in-flight calls");
  cmd->add_option("--short-circuit", flags.short_circuit,
                  "Stop a stage at the first non-yes vote");
  cmd->add_option("--solution-field", flags.solution_field,
                  "Dataset solution field: raw (full trace) or answer");
  cmd->add_option("--temperature", flags.temperature, "Sampling temperature");
  cmd->add_option("--top-p", flags.top_p, "Sampling top-p");
  cmd->add_option("--max-output-tokens", flags.max_output_tokens, "Max completion tokens");
  cmd->add_option("--template-dir", flags.template_dir, "Prompt template directory");
}

selfcurate::RunConfig load_with_overrides(const CommonFlags& flags) {
  selfcurate::RunConfig config = selfcurate::load_config(flags.config_path);
  if (flags.n) config.n = *flags.n;
  if (flags.v) config.v = *flags.v;
  if (flags.verifier) {
    auto kind = selfcurate::verifier_kind_from_string(*flags.verifier);
    if (!kind) throw selfcurate::ConfigError("field 'verifier': must be uq or simple");
    config.verifier = *kind;
  }
  if (flags.policy) {
    auto policy = selfcurate::selection_policy_from_string(*flags.policy);
    if (!policy) {
      throw selfcurate::ConfigError("field 'policy': must be first_valid or all_valid");
    }
    config.policy = *policy;
  }
  if (flags.seed_file) config.seed_file = *flags.seed_file;
  if (flags.output_dir) config.output_dir = *flags.output_dir;
  if (flags.max_concurrency) config.max_concurrency = *flags.max_concurrency;
  if (flags.short_circuit) config.short_circuit = *flags.short_circuit;
  if (flags.solution_field) {
    if (*flags.solution_field == "raw") {
      config.solution_field = selfcurate::SolutionField::raw;
    } else if (*flags.solution_field == "answer") {
      config.solution_field = selfcurate::SolutionField::answer;
    } else {
      throw selfcurate::ConfigError("field 'solution_field': must be raw or answer");
    }
  }
  if (flags.temperature) config.sampling.temperature = *flags.temperature;
  if (flags.top_p) config.sampling.top_p = *flags.top_p;
  if (flags.max_output_tokens) config.sampling.max_output_tokens = *flags.max_output_tokens;
  if (flags.template_dir) config.template_dir = *flags.template_dir;
  return config;
}

int classify_and_report(const std::exception& e) {
  if (dynamic_cast<const selfcurate::ConfigError*>(&e)) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (dynamic_cast<const selfcurate::RetriesExhaustedError*>(&e)) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  }
  if (dynamic_cast<const selfcurate::BackendError*>(&e)) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  }
  if (dynamic_cast<const selfcurate::IoError*>(&e)) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
  std::cerr << "error: " << e.what() << "\n";
  return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-curated SFT dataset builder with cascade self-verification"};
  app.require_subcommand(1);

  CommonFlags curate_flags;
  auto* curate_cmd = app.add_subcommand("curate", "Run the full curation pipeline");
  add_common_flags(curate_cmd, curate_flags);

  CommonFlags ttc_flags;
  std::string ttc_question;
  std::string ttc_question_file;
  std::string ttc_question_id = "q0";
  auto* ttc_cmd = app.add_subcommand("ttc", "Answer one question with generate-verify-select");
  add_common_flags(ttc_cmd, ttc_flags);
  ttc_cmd->add_option("--question", ttc_question, "Question text");
  ttc_cmd->add_option("--question-file", ttc_question_file, "File containing the question");
  ttc_cmd->add_option("--question-id", ttc_question_id, "Identifier for the question");

  CommonFlags verify_flags;
  std::string verify_question;
  std::string verify_answer;
  std::string verify_answer_file;
  bool verify_json = false;
  auto* verify_cmd =
      app.add_subcommand("verify", "Run the verification cascade on one question/answer pair");
  add_common_flags(verify_cmd, verify_flags);
  verify_cmd->add_option("--question", verify_question, "Question text")->required();
  verify_cmd->add_option("--answer", verify_answer, "Answer text");
  verify_cmd->add_option("--answer-file", verify_answer_file, "File containing the answer");
  verify_cmd->add_flag("--json", verify_json, "Print the verification record as JSON");

  std::string stats_dir;
  bool stats_json = false;
  auto* stats_cmd = app.add_subcommand("stats", "Recompute the stats report from a ledger");
  stats_cmd->add_option("run_dir", stats_dir, "Run directory")->required();
  stats_cmd->add_flag("--json", stats_json, "Print JSON instead of text");

  std::string resume_dir;
  auto* resume_cmd = app.add_subcommand("resume", "Complete an interrupted run");
  resume_cmd->add_option("run_dir", resume_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (curate_cmd->parsed()) {
      selfcurate::RunConfig config = load_with_overrides(curate_flags);
      selfcurate::run_curate(config, std::cout);
      return kExitOk;
    }
    if (ttc_cmd->parsed()) {
      selfcurate::RunConfig config = load_with_overrides(ttc_flags);
      std::string question = ttc_question;
      if (question.empty() && !ttc_question_file.empty()) {
        question = selfcurate::trim(selfcurate::read_file(ttc_question_file));
      }
      if (question.empty()) {
        throw selfcurate::ConfigError("field 'question': pass --question or --question-file");
      }
      selfcurate::SeedQuestion seed{ttc_question_id, question, selfcurate::Domain::other};
      auto result = selfcurate::run_ttc(config, seed, std::cout);
      std::cout << result.chosen_text << "\n";
      return kExitOk;
    }
    if (verify_cmd->parsed()) {
      selfcurate::RunConfig config = load_with_overrides(verify_flags);
      std::string answer = verify_answer;
      if (answer.empty() && !verify_answer_file.empty()) {
        answer = selfcurate::read_file(verify_answer_file);
      }
      auto record = selfcurate::run_verify(config, verify_question, answer, std::cout);
      if (verify_json) {
        std::cout << selfcurate::verification_record_to_json(record);
      }
      return kExitOk;
    }
    if (stats_cmd->parsed()) {
      auto stats = selfcurate::run_stats(stats_dir);
      std::cout << (stats_json ? selfcurate::stats_to_json(stats)
                               : selfcurate::stats_to_text(stats));
      return kExitOk;
    }
    if (resume_cmd->parsed()) {
      selfcurate::run_resume(resume_dir, std::cout);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    return classify_and_report(e);
  }
  return kExitFailure;
}
