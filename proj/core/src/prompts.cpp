#include "selfcurate/prompts.hpp"

#include <array>
#include <sstream>
#include <utility>
#include <vector>

#include "selfcurate/types.hpp"
#include "selfcurate/util.hpp"

namespace selfcurate {

namespace {

constexpr const char* kCycleInfer =
    R"TPL(Given an answer, please generate the most likely question that would have prompted this answer. Focus on inferring the core question that this answer is addressing. Output only the inferred question, without any additional explanation.

Answer:
{answer}

Inferred Question:
)TPL";

constexpr const char* kCycleCompare =
    R"TPL(You are evaluating whether an answer is relevant to the original question and touches the core of the question by comparing the original question with an inferred question derived only from the answer.

Original Question: {original_question}
Inferred Question: {inferred_question}

Compare the two questions and determine:
1. If the original question and inferred question are asking about the same core topic
2. If the original question and inferred question share the same key elements and requirements
3. If answering one question would effectively address the other question

After your analysis, provide your decision: [[Y]] if the questions are semantically equivalent and address the same core problem, or [[N]] if they are asking about different things.
)TPL";

constexpr const char* kFact =
    R"TPL(Please act as an impartial judge and carefully analyze the following answer for any factual errors, logical flaws, or misleading information.

Question: {question}
Answer: {answer}

Consider the credibility of the claims made in the answer and determine if they align with established knowledge. Evaluate:
1. Are there any incorrect facts, dates, numbers, formulas, or claims?
2. Is there any faulty logic, reasoning, or problem-solving approach?
3. Are there any misleading, incomplete, or ambiguous explanations?
4. Does the answer introduce any misconceptions or propagate common errors?

Minor typos or grammatical errors are acceptable. But be strict about any factual error, calculation error, or logical flaw. When unsure, lean toward accepting statements unless they contain clear errors.

After a thorough analysis, provide your decision: [[Y]] if the answer has no factual errors or major flaws, or [[N]] if it contains important factual errors or logical flaws that would mislead the user.
)TPL";

constexpr const char* kCorrectness =
    R"TPL(Please act as an impartial judge and evaluate whether the response is completely correct in both process and conclusion.

Question: {question}
Answer: {answer}

Consider correctness, usefulness, completeness and depth in your assessment. Consider whether this answer completely solves the question.

You should rely on your own reasoning to form a reference solution and compare the answer to your reasoning.

Begin your evaluation by giving a brief summary of your thoughts on the response. Focus on whether it is accurate, addresses the question well, and is reasonably detailed. Be precise about any errors or gaps you notice.

Notes:
1. If the answer is partial, high-level, or just states that this is an open problem, you should not accept it.
2. If the answer lacks details or is not comprehensive, you should not accept it.
3. If the answer contains any errors, you should not accept it.
4. You should only accept the answer if it is at least 95

After providing your explanation, decide whether this answer is correct. Think twice about whether this answer solves the question.
Format: Accepted: [[Y]] if you accept the answer or Accepted: [[N]] if you do not accept.
)TPL";

constexpr const char* kSimple =
    R"TPL(Please act as an impartial judge and evaluate whether the following answer is accurate and correct given the question.

Question: {question}
Answer: {answer}

Provide your decision: [[Y]] if the answer is accurate and correct, or [[N]] if it is not.
)TPL";

struct TemplateFile {
  const char* filename;
  std::string PromptTemplates::*member;
};

constexpr std::array<TemplateFile, 5> kFiles = {{
    {"cycle_infer.txt", &PromptTemplates::cycle_infer},
    {"cycle_compare.txt", &PromptTemplates::cycle_compare},
    {"fact.txt", &PromptTemplates::fact},
    {"correctness.txt", &PromptTemplates::correctness},
    {"simple.txt", &PromptTemplates::simple},
}};

using Substitution = std::pair<std::string_view, std::string_view>;

// Single left-to-right pass: placeholder sites found in the template are
// replaced, inserted values are never rescanned, unknown braces stay literal.
std::string render(std::string_view tmpl, const std::vector<Substitution>& subs,
                   std::string_view template_name) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::vector<bool> used(subs.size(), false);
  size_t pos = 0;
  while (pos < tmpl.size()) {
    char c = tmpl[pos];
    if (c == '{') {
      bool matched = false;
      for (size_t i = 0; i < subs.size(); ++i) {
        std::string_view name = subs[i].first;
        if (tmpl.substr(pos, name.size()) == name) {
          out += subs[i].second;
          pos += name.size();
          used[i] = true;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out += c;
    ++pos;
  }
  for (size_t i = 0; i < subs.size(); ++i) {
    if (!used[i]) {
      throw ConfigError("template '" + std::string(template_name) +
                        "' is missing placeholder " + std::string(subs[i].first));
    }
  }
  return out;
}

void require_nonempty(std::string_view value, const char* what) {
  if (trim(value).empty()) {
    throw std::invalid_argument(std::string(what) + " must be non-empty");
  }
}

}  // namespace

const PromptTemplates& PromptTemplates::builtin() {
  static const PromptTemplates templates = {kCycleInfer, kCycleCompare, kFact, kCorrectness,
                                            kSimple};
  return templates;
}

PromptTemplates PromptTemplates::load_dir(const std::filesystem::path& dir) {
  PromptTemplates templates;
  for (const auto& file : kFiles) {
    templates.*(file.member) = read_file(dir / file.filename);
  }
  return templates;
}

void PromptTemplates::write_dir(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& file : kFiles) {
    atomic_write_file(dir / file.filename, this->*(file.member));
  }
  atomic_write_file(dir / "manifest.sha256", manifest());
}

std::string PromptTemplates::manifest() const {
  std::ostringstream out;
  for (const auto& file : kFiles) {
    out << sha256_hex(this->*(file.member)) << "  " << file.filename << "\n";
  }
  return out.str();
}

void PromptTemplates::verify_manifest(const std::filesystem::path& dir) {
  PromptTemplates templates = load_dir(dir);
  std::string expected = read_file(dir / "manifest.sha256");
  std::string actual = templates.manifest();
  if (expected != actual) {
    throw ConfigError("template manifest mismatch under " + dir.string() +
                      "; templates were modified after the manifest was written");
  }
}

std::string render_cycle_infer_prompt(const PromptTemplates& templates,
                                      std::string_view answer) {
  require_nonempty(answer, "answer");
  return render(templates.cycle_infer, {{"{answer}", answer}}, "cycle_infer");
}

std::string render_cycle_compare_prompt(const PromptTemplates& templates,
                                        std::string_view original_question,
                                        std::string_view inferred_question) {
  require_nonempty(original_question, "original_question");
  require_nonempty(inferred_question, "inferred_question");
  return render(templates.cycle_compare,
                {{"{original_question}", original_question},
                 {"{inferred_question}", inferred_question}},
                "cycle_compare");
}

std::string render_fact_prompt(const PromptTemplates& templates, std::string_view question,
                               std::string_view answer) {
  require_nonempty(question, "question");
  require_nonempty(answer, "answer");
  return render(templates.fact, {{"{question}", question}, {"{answer}", answer}}, "fact");
}

std::string render_correctness_prompt(const PromptTemplates& templates,
                                      std::string_view question, std::string_view answer) {
  require_nonempty(question, "question");
  require_nonempty(answer, "answer");
  return render(templates.correctness, {{"{question}", question}, {"{answer}", answer}},
                "correctness");
}

std::string render_simple_prompt(const PromptTemplates& templates, std::string_view question,
                                 std::string_view answer) {
  require_nonempty(question, "question");
  require_nonempty(answer, "answer");
  return render(templates.simple, {{"{question}", question}, {"{answer}", answer}}, "simple");
}

}  // namespace selfcurate
