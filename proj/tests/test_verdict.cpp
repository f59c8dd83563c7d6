#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "selfcurate/verifier.hpp"

using namespace selfcurate;

#ifndef SELFCURATE_TEST_DATA_DIR
#error "SELFCURATE_TEST_DATA_DIR must be defined by the build"
#endif

TEST_CASE("single marker cases") {
  CHECK(parse_verdict("...analysis... Accepted: [[Y]]") == Verdict::yes);
  CHECK(parse_verdict("nope [[N]]") == Verdict::no);
  CHECK(parse_verdict("[[Y]]") == Verdict::yes);
  CHECK(parse_verdict("[[N]]") == Verdict::no);
}

TEST_CASE("last occurrence wins when both markers appear") {
  CHECK(parse_verdict("I considered [[Y]] but conclude [[N]]") == Verdict::no);
  CHECK(parse_verdict("leaning [[N]]... actually [[Y]]") == Verdict::yes);
  CHECK(parse_verdict("[[Y]][[N]][[Y]]") == Verdict::yes);
}

TEST_CASE("missing markers mean parse failure") {
  CHECK(parse_verdict("The answer is correct.") == Verdict::parse_failure);
  CHECK(parse_verdict("") == Verdict::parse_failure);
  CHECK(parse_verdict("[Y] [N] [[y]] [[n]] [[ Y ]]") == Verdict::parse_failure);
}

TEST_CASE("parse_verdict is deterministic") {
  for (const char* text : {"a [[Y]] b [[N]] c", "", "[[Y]]", "noise"}) {
    CHECK(parse_verdict(text) == parse_verdict(text));
  }
}

TEST_CASE("hand-labeled judge output corpus agrees 100%") {
  std::ifstream in(std::string(SELFCURATE_TEST_DATA_DIR) + "/judge_corpus.jsonl");
  REQUIRE(in.good());
  std::string line;
  int total = 0;
  int mismatches = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    std::string text = j.at("text").get<std::string>();
    std::string label = j.at("label").get<std::string>();
    auto expected = verdict_from_string(label);
    REQUIRE(expected.has_value());
    ++total;
    if (parse_verdict(text) != *expected) {
      ++mismatches;
      CAPTURE(text);
      CHECK(parse_verdict(text) == *expected);
    }
  }
  CHECK(total == 50);
  CHECK(mismatches == 0);
}
