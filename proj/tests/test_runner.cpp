#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracle.hpp"
#include "selfcurate/runner.hpp"
#include "selfcurate/util.hpp"

using namespace selfcurate;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / name;
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// An all-yes mock script with wellformed generations.
std::string all_yes_script() {
  return R"({
    "default": "[[Y]]",
    "rules": [
      {"match": {"purpose": "generate"}, "response": "<think>steps</think>\nThe answer is 12."},
      {"match": {"purpose": "infer_question"}, "response": "What is being asked?"}
    ]
  })";
}

void write_seeds(const fs::path& path, int count) {
  std::ofstream out(path);
  for (int i = 0; i < count; ++i) {
    out << R"({"id": "q)" << i << R"(", "question": "What is f()" << i << R"()?"})"
        << "\n";
  }
}

RunConfig make_mock_config(const TempDir& dir, int seeds, const std::string& script) {
  write_seeds(dir.path / "seeds.jsonl", seeds);
  atomic_write_file(dir.path / "script.json", script);
  RunConfig config;
  config.backend.type = "mock";
  config.backend.script_file = (dir.path / "script.json").string();
  config.seed_file = (dir.path / "seeds.jsonl").string();
  config.output_dir = (dir.path / "run").string();
  config.n = 2;
  config.v = 1;
  config.max_concurrency = 2;
  config.retry = {2, 0, 2.0, 0};
  return config;
}

}  // namespace

TEST_CASE("run_curate writes a complete run directory") {
  TempDir dir("selfcurate_runner_curate");
  RunConfig config = make_mock_config(dir, 3, all_yes_script());
  std::ostringstream log;
  auto result = run_curate(config, log);

  RunPaths paths = RunPaths::in(config.output_dir);
  CHECK(fs::exists(paths.config));
  CHECK(fs::exists(paths.ledger));
  CHECK(fs::exists(paths.dataset));
  CHECK(fs::exists(paths.stats_json));
  CHECK(fs::exists(paths.stats_text));
  CHECK(fs::exists(paths.templates_dir / "manifest.sha256"));
  CHECK_FALSE(fs::exists(paths.lock));  // released on exit

  CHECK(result.dataset_size == 3);  // first_valid: one per seed
  CHECK(result.stats.accepted_count == 6);
  CHECK(result.stats.total_inference_calls == 3 * (2 + 2 * 4));

  // stats recomputed from the ledger match the emitted report
  StatsReport replayed = run_stats(config.output_dir);
  CHECK(replayed == result.stats);
  CHECK(stats_from_json(read_file(paths.stats_json)) == result.stats);

  // a second curate into the same directory is refused
  CHECK_THROWS_AS(run_curate(config, log), ConfigError);
}

TEST_CASE("resume of a completed run is a no-op with a notice") {
  TempDir dir("selfcurate_runner_noop");
  RunConfig config = make_mock_config(dir, 2, all_yes_script());
  std::ostringstream log;
  run_curate(config, log);

  std::ostringstream resume_log;
  auto result = run_resume(config.output_dir, resume_log);
  CHECK(resume_log.str().find("already complete") != std::string::npos);
  CHECK(result.stats.seeds_processed == 2);
}

TEST_CASE("run_verify prints three passed stages on an all-yes backend") {
  TempDir dir("selfcurate_runner_verify");
  RunConfig config = make_mock_config(dir, 1, all_yes_script());
  config.output_dir.clear();
  std::ostringstream log;
  auto record = run_verify(config, "What is 6 x 7?", "42", log);
  CHECK(record.accepted);
  CHECK(record.stage_results.size() == 3);
  CHECK(log.str().find("stage cycle: passed") != std::string::npos);
  CHECK(log.str().find("stage fact: passed") != std::string::npos);
  CHECK(log.str().find("stage correctness: passed") != std::string::npos);
  CHECK(log.str().find("accepted=true") != std::string::npos);
}

TEST_CASE("run_ttc writes the structured result and the plain answer") {
  TempDir dir("selfcurate_runner_ttc");
  RunConfig config = make_mock_config(dir, 1, all_yes_script());
  config.n = 4;
  config.v = 2;
  std::ostringstream log;
  SeedQuestion question{"t1", "What is f(1)?", Domain::math};
  auto result = run_ttc(config, question, log);
  CHECK(result.accepted);
  CHECK(result.chosen_candidate_index == 0);
  CHECK(result.total_calls == 1 + 4 * 2);

  RunPaths paths = RunPaths::in(config.output_dir);
  CHECK(fs::exists(paths.ttc_result));
  CHECK(read_file(paths.answer) == "The answer is 12.\n");
  auto j = nlohmann::json::parse(read_file(paths.ttc_result));
  CHECK(j.at("accepted").get<bool>());
  CHECK(j.at("total_calls").get<int>() == 9);

  StatsReport stats = run_stats(config.output_dir);
  CHECK(stats.total_inference_calls == 9);
}

TEST_CASE("determinism: two identical mock runs produce identical outputs") {
  TempDir dir_a("selfcurate_runner_det_a");
  TempDir dir_b("selfcurate_runner_det_b");
  // a mixed script: some candidates rejected
  std::string script = R"({
    "default": "[[Y]]",
    "rules": [
      {"match": {"purpose": "generate"}, "response": "<think>s</think>\nAnswer text."},
      {"match": {"purpose": "infer_question"}, "response": "inferred?"},
      {"match": {"question_id": "q1", "candidate_index": 0, "stage": "fact"}, "response": "[[N]]"},
      {"match": {"question_id": "q3", "stage": "correctness"}, "response": "[[N]]"}
    ]
  })";
  RunConfig config_a = make_mock_config(dir_a, 5, script);
  RunConfig config_b = make_mock_config(dir_b, 5, script);
  config_a.max_concurrency = 1;
  config_b.max_concurrency = 1;
  std::ostringstream log;
  run_curate(config_a, log);
  run_curate(config_b, log);

  RunPaths paths_a = RunPaths::in(config_a.output_dir);
  RunPaths paths_b = RunPaths::in(config_b.output_dir);
  CHECK(read_file(paths_a.dataset) == read_file(paths_b.dataset));
  CHECK(read_file(paths_a.stats_json) == read_file(paths_b.stats_json));

  // ledgers match line-for-line once timestamps and the config digest (which
  // embeds absolute paths) are stripped
  std::istringstream in_a(read_file(paths_a.ledger));
  std::istringstream in_b(read_file(paths_b.ledger));
  std::string line_a;
  std::string line_b;
  int lines = 0;
  while (std::getline(in_a, line_a)) {
    REQUIRE(std::getline(in_b, line_b));
    auto ja = nlohmann::ordered_json::parse(line_a);
    auto jb = nlohmann::ordered_json::parse(line_b);
    ja.erase("ts");
    jb.erase("ts");
    if (ja.contains("config_digest")) ja.erase("config_digest");
    if (jb.contains("config_digest")) jb.erase("config_digest");
    REQUIRE(ja.dump() == jb.dump());
    ++lines;
  }
  CHECK_FALSE(std::getline(in_b, line_b));
  CHECK(lines == 7);  // run_start + 5 seeds + run_complete
}

TEST_CASE("concurrent run directory access is blocked by the pid lock") {
  TempDir dir("selfcurate_runner_lock");
  fs::path lock_path = dir.path / ".lock";
  {
    RunLock lock(lock_path);
    CHECK(fs::exists(lock_path));
    CHECK_THROWS_AS((RunLock{lock_path}), ConfigError);  // same live pid holds it
  }
  CHECK_FALSE(fs::exists(lock_path));

  // a stale lock from a dead process is taken over
  atomic_write_file(lock_path, "999999999\n");
  RunLock lock(lock_path);
  CHECK(fs::exists(lock_path));
}

TEST_CASE("stats on a directory without a ledger raises IoError") {
  TempDir dir("selfcurate_runner_nostats");
  CHECK_THROWS_AS(run_stats(dir.path), IoError);
}
