#include "selfcurate/generation.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "selfcurate/util.hpp"

namespace selfcurate {

using json = nlohmann::json;

std::string extract_solution(std::string_view raw_text, const ReasoningMarkers& markers) {
  if (markers.close.empty()) {
    return trim(raw_text);
  }
  auto pos = raw_text.find(markers.close);
  if (pos == std::string_view::npos) {
    return {};
  }
  return trim(raw_text.substr(pos + markers.close.size()));
}

std::string strip_reasoning(std::string_view text, const ReasoningMarkers& markers) {
  if (!markers.close.empty()) {
    auto pos = text.find(markers.close);
    if (pos != std::string_view::npos) {
      return trim(text.substr(pos + markers.close.size()));
    }
  }
  return trim(text);
}

bool is_wellformed(const Candidate& candidate, const ReasoningMarkers& markers) {
  if (candidate.finish_reason != FinishReason::stop) return false;
  if (!markers.close.empty() &&
      candidate.raw_text.find(markers.close) == std::string::npos) {
    return false;
  }
  return !extract_solution(candidate.raw_text, markers).empty();
}

Candidate make_candidate(const std::string& question_id, int index,
                         const InferenceResponse& response, const ReasoningMarkers& markers) {
  Candidate candidate;
  candidate.question_id = question_id;
  candidate.index = index;
  candidate.raw_text = response.text;
  candidate.finish_reason = response.finish_reason;
  candidate.solution_text = extract_solution(response.text, markers);
  candidate.wellformed = is_wellformed(candidate, markers);
  return candidate;
}

std::vector<Candidate> sample_candidates(const SeedQuestion& question, int n,
                                         const SamplingParams& params, Backend& backend,
                                         const RetryPolicy& retry,
                                         const ReasoningMarkers& markers) {
  if (n < 1) throw std::invalid_argument("sample_candidates: n must be >= 1");
  std::vector<Candidate> candidates;
  candidates.reserve(size_t(n));
  for (int i = 0; i < n; ++i) {
    InferenceRequest request;
    request.unit_key = {question.id, i, CallPurpose::generate, std::nullopt, 0};
    request.prompt = question.question;
    request.params = params;
    request.seed_hint = i;
    try {
      auto result = complete_with_retry(backend, request, retry);
      candidates.push_back(make_candidate(question.id, i, result.response, markers));
    } catch (const BackendError& e) {
      Candidate failed;
      failed.question_id = question.id;
      failed.index = i;
      failed.finish_reason = FinishReason::error;
      failed.wellformed = false;
      failed.error = e.what();
      candidates.push_back(std::move(failed));
    }
  }
  return candidates;
}

SeedLoadResult load_seed_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("seed_file: cannot open " + path.string());
  }
  SeedLoadResult result;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError("seed_file line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!record.is_object()) {
      throw ConfigError("seed_file line " + std::to_string(line_no) + ": expected an object");
    }
    SeedQuestion seed;
    if (!record.contains("id") || !record.at("id").is_string() ||
        record.at("id").get<std::string>().empty()) {
      throw ConfigError("seed_file line " + std::to_string(line_no) +
                        ": field 'id' must be a non-empty string");
    }
    seed.id = record.at("id").get<std::string>();
    if (!seen_ids.insert(seed.id).second) {
      throw ConfigError("seed_file line " + std::to_string(line_no) + ": duplicate id '" +
                        seed.id + "'");
    }
    if (!record.contains("question") || !record.at("question").is_string() ||
        trim(record.at("question").get<std::string>()).empty()) {
      throw ConfigError("seed_file line " + std::to_string(line_no) +
                        ": field 'question' must be a non-empty string");
    }
    seed.question = record.at("question").get<std::string>();
    if (record.contains("domain")) {
      auto domain = domain_from_string(record.at("domain").get<std::string>());
      if (!domain) {
        throw ConfigError("seed_file line " + std::to_string(line_no) +
                          ": field 'domain' must be one of math|science|code|other");
      }
      seed.domain = *domain;
    }
    // Source files may carry answers or reasoning traces; only the question
    // is kept.
    for (const auto& [field, value] : record.items()) {
      if (field != "id" && field != "question" && field != "domain") {
        ++result.dropped_answer_fields;
      }
    }
    result.seeds.push_back(std::move(seed));
  }
  return result;
}

}  // namespace selfcurate
