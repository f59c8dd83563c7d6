#include <doctest.h>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "selfcurate/prompts.hpp"
#include "selfcurate/types.hpp"
#include "selfcurate/util.hpp"

using namespace selfcurate;

#ifndef SELFCURATE_REPO_TEMPLATE_DIR
#error "SELFCURATE_REPO_TEMPLATE_DIR must be defined by the build"
#endif

namespace {

// Splits a template at its placeholder sites and checks that the rendered
// text consists of exactly the same literal segments with the values in
// between: byte-identical outside placeholder sites.
void check_differs_only_at_placeholders(
    const std::string& tmpl, const std::string& rendered,
    const std::vector<std::pair<std::string, std::string>>& subs) {
  size_t tpos = 0;
  size_t rpos = 0;
  while (tpos < tmpl.size()) {
    bool matched = false;
    for (const auto& [name, value] : subs) {
      if (tmpl.compare(tpos, name.size(), name) == 0) {
        REQUIRE(rendered.compare(rpos, value.size(), value) == 0);
        tpos += name.size();
        rpos += value.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    REQUIRE(rpos < rendered.size());
    REQUIRE(tmpl[tpos] == rendered[rpos]);
    ++tpos;
    ++rpos;
  }
  REQUIRE(rpos == rendered.size());
}

}  // namespace

TEST_CASE("cycle infer prompt substitutes the answer byte-exactly") {
  const auto& templates = PromptTemplates::builtin();
  std::string rendered = render_cycle_infer_prompt(templates, "42");
  CHECK(rendered.find("Answer:\n42") != std::string::npos);
  CHECK(rendered.find("Inferred Question:") != std::string::npos);
  check_differs_only_at_placeholders(templates.cycle_infer, rendered, {{"{answer}", "42"}});
}

TEST_CASE("braces in values are preserved literally, no nested templating") {
  const auto& templates = PromptTemplates::builtin();
  std::string value = "f(x) = {x : x > 0} and {answer} stays literal";
  std::string rendered = render_cycle_infer_prompt(templates, value);
  CHECK(rendered.find(value) != std::string::npos);
  // the placeholder text inside the value must not be expanded again
  CHECK(rendered.find("{answer} stays literal") != std::string::npos);
}

TEST_CASE("empty inputs violate the render preconditions") {
  const auto& templates = PromptTemplates::builtin();
  CHECK_THROWS_AS(render_cycle_infer_prompt(templates, ""), std::invalid_argument);
  CHECK_THROWS_AS(render_cycle_infer_prompt(templates, "   \n"), std::invalid_argument);
  CHECK_THROWS_AS(render_cycle_compare_prompt(templates, "", "x"), std::invalid_argument);
  CHECK_THROWS_AS(render_cycle_compare_prompt(templates, "x", ""), std::invalid_argument);
  CHECK_THROWS_AS(render_fact_prompt(templates, "q", ""), std::invalid_argument);
  CHECK_THROWS_AS(render_correctness_prompt(templates, "", "a"), std::invalid_argument);
  CHECK_THROWS_AS(render_simple_prompt(templates, "", ""), std::invalid_argument);
}

TEST_CASE("compare prompt carries both questions in labeled slots") {
  const auto& templates = PromptTemplates::builtin();
  std::string rendered =
      render_cycle_compare_prompt(templates, "original q", "inferred q");
  CHECK(rendered.find("Original Question: original q") != std::string::npos);
  CHECK(rendered.find("Inferred Question: inferred q") != std::string::npos);

  std::string same = render_cycle_compare_prompt(templates, "twice", "twice");
  CHECK(same.find("Original Question: twice") != std::string::npos);
  CHECK(same.find("Inferred Question: twice") != std::string::npos);
}

TEST_CASE("an inferred question containing [[Y]] is substituted verbatim") {
  const auto& templates = PromptTemplates::builtin();
  std::string rendered =
      render_cycle_compare_prompt(templates, "q", "what does [[Y]] mean?");
  CHECK(rendered.find("Inferred Question: what does [[Y]] mean?") != std::string::npos);
}

TEST_CASE("fact, correctness, and simple prompts substitute both slots") {
  const auto& templates = PromptTemplates::builtin();
  for (auto render : {render_fact_prompt, render_correctness_prompt, render_simple_prompt}) {
    std::string rendered = render(templates, "THE-QUESTION", "THE-ANSWER");
    CHECK(rendered.find("Question: THE-QUESTION") != std::string::npos);
    CHECK(rendered.find("Answer: THE-ANSWER") != std::string::npos);
  }
  check_differs_only_at_placeholders(
      templates.fact, render_fact_prompt(templates, "Q1", "A1"),
      {{"{question}", "Q1"}, {"{answer}", "A1"}});
  check_differs_only_at_placeholders(
      templates.correctness, render_correctness_prompt(templates, "Q2", "A2"),
      {{"{question}", "Q2"}, {"{answer}", "A2"}});
  check_differs_only_at_placeholders(
      templates.simple, render_simple_prompt(templates, "Q3", "A3"),
      {{"{question}", "Q3"}, {"{answer}", "A3"}});
  check_differs_only_at_placeholders(
      templates.cycle_compare, render_cycle_compare_prompt(templates, "QQ", "II"),
      {{"{original_question}", "QQ"}, {"{inferred_question}", "II"}});
}

TEST_CASE("builtin templates match the checked-in template files") {
  std::filesystem::path dir = SELFCURATE_REPO_TEMPLATE_DIR;
  PromptTemplates from_files = PromptTemplates::load_dir(dir);
  const auto& builtin = PromptTemplates::builtin();
  CHECK(from_files.cycle_infer == builtin.cycle_infer);
  CHECK(from_files.cycle_compare == builtin.cycle_compare);
  CHECK(from_files.fact == builtin.fact);
  CHECK(from_files.correctness == builtin.correctness);
  CHECK(from_files.simple == builtin.simple);
  CHECK(read_file(dir / "manifest.sha256") == builtin.manifest());
}

TEST_CASE("write_dir round-trips and the manifest verifies") {
  auto dir = std::filesystem::temp_directory_path() / "selfcurate_templates_test";
  std::filesystem::remove_all(dir);
  const auto& builtin = PromptTemplates::builtin();
  builtin.write_dir(dir);
  PromptTemplates::verify_manifest(dir);
  PromptTemplates reloaded = PromptTemplates::load_dir(dir);
  CHECK(reloaded.fact == builtin.fact);

  // tampering is detected
  atomic_write_file(dir / "fact.txt", "tampered");
  CHECK_THROWS_AS(PromptTemplates::verify_manifest(dir), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("a template missing its placeholder is rejected") {
  PromptTemplates broken = PromptTemplates::builtin();
  broken.fact = "no placeholders here";
  CHECK_THROWS_AS(render_fact_prompt(broken, "q", "a"), ConfigError);
}
