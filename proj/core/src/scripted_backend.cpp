#include "selfcurate/scripted_backend.hpp"

#include <chrono>
#include <thread>

#include <nlohmann/json.hpp>

#include "selfcurate/util.hpp"

namespace selfcurate {

using json = nlohmann::json;

bool ScriptRule::matches(const InferenceRequest& request) const {
  const UnitKey& key = request.unit_key;
  if (question_id && *question_id != key.question_id) return false;
  if (candidate_index && *candidate_index != key.candidate_index) return false;
  if (purpose && *purpose != key.purpose) return false;
  if (stage && (!key.stage || *stage != *key.stage)) return false;
  if (vote_index && *vote_index != key.vote_index) return false;
  if (attempt && *attempt != request.attempt) return false;
  return true;
}

ScriptRule& ScriptedBackend::add_rule(ScriptRule rule) {
  rules_.push_back(std::move(rule));
  fail_budget_.push_back(rules_.back().fail_times);
  return rules_.back();
}

void ScriptedBackend::on_generate(const std::string& question_id, int candidate_index,
                                  std::string text, FinishReason finish) {
  ScriptRule rule;
  rule.question_id = question_id;
  rule.candidate_index = candidate_index;
  rule.purpose = CallPurpose::generate;
  rule.responses = {std::move(text)};
  rule.finish_reason = finish;
  add_rule(std::move(rule));
}

void ScriptedBackend::on_generate_all(std::string text, FinishReason finish) {
  ScriptRule rule;
  rule.purpose = CallPurpose::generate;
  rule.responses = {std::move(text)};
  rule.finish_reason = finish;
  add_rule(std::move(rule));
}

void ScriptedBackend::on_infer(const std::string& question_id, int candidate_index,
                               std::string text) {
  ScriptRule rule;
  rule.question_id = question_id;
  rule.candidate_index = candidate_index;
  rule.purpose = CallPurpose::infer_question;
  rule.responses = {std::move(text)};
  add_rule(std::move(rule));
}

void ScriptedBackend::on_infer_all(std::string text) {
  ScriptRule rule;
  rule.purpose = CallPurpose::infer_question;
  rule.responses = {std::move(text)};
  add_rule(std::move(rule));
}

void ScriptedBackend::on_judge(const std::string& question_id, int candidate_index,
                               Stage stage, int vote_index, std::string response) {
  ScriptRule rule;
  rule.question_id = question_id;
  rule.candidate_index = candidate_index;
  rule.purpose = CallPurpose::judge;
  rule.stage = stage;
  rule.vote_index = vote_index;
  rule.responses = {std::move(response)};
  add_rule(std::move(rule));
}

void ScriptedBackend::on_judge_all(const std::string& question_id, int candidate_index,
                                   Stage stage, std::string response) {
  ScriptRule rule;
  rule.question_id = question_id;
  rule.candidate_index = candidate_index;
  rule.purpose = CallPurpose::judge;
  rule.stage = stage;
  rule.responses = {std::move(response)};
  add_rule(std::move(rule));
}

InferenceResponse ScriptedBackend::complete(const InferenceRequest& request) {
  size_t rule_index = rules_.size();
  {
    std::lock_guard lock(mutex_);
    log_.push_back(request);
    ++in_flight_;
    if (in_flight_ > max_in_flight_) max_in_flight_ = in_flight_;
    for (size_t i = 0; i < rules_.size(); ++i) {
      if (rules_[i].matches(request)) {
        rule_index = i;
        break;
      }
    }
  }
  struct InFlightGuard {
    ScriptedBackend* self;
    ~InFlightGuard() {
      std::lock_guard lock(self->mutex_);
      --self->in_flight_;
    }
  } guard{this};

  if (latency_ms_ > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(latency_ms_));
  }

  if (rule_index == rules_.size()) {
    if (default_response_) {
      return {*default_response_, FinishReason::stop, {}};
    }
    throw ScriptMissError("no script rule and no default for unit key " +
                          request.unit_key.str());
  }

  const ScriptRule& rule = rules_[rule_index];
  {
    std::lock_guard lock(mutex_);
    if (fail_budget_[rule_index] > 0) {
      --fail_budget_[rule_index];
      if (rule.fail_kind == "transport") throw TransportError("scripted transport failure");
      if (rule.fail_kind == "malformed")
        throw MalformedResponseError("scripted malformed body");
      if (rule.fail_kind == "http_400") throw HttpStatusError(400, "scripted HTTP 400");
      throw HttpStatusError(429, "scripted rate limit");
    }
  }

  if (rule.responses.empty()) {
    if (default_response_) return {*default_response_, rule.finish_reason, {}};
    throw ScriptMissError("script rule has no response for unit key " +
                          request.unit_key.str());
  }
  size_t idx = size_t(request.attempt) < rule.responses.size()
                   ? size_t(request.attempt)
                   : rule.responses.size() - 1;
  return {rule.responses[idx], rule.finish_reason, {}};
}

int ScriptedBackend::total_calls() const {
  std::lock_guard lock(mutex_);
  return int(log_.size());
}

std::vector<InferenceRequest> ScriptedBackend::call_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

int ScriptedBackend::calls_matching(
    const std::function<bool(const InferenceRequest&)>& pred) const {
  std::lock_guard lock(mutex_);
  int count = 0;
  for (const auto& request : log_) {
    if (pred(request)) ++count;
  }
  return count;
}

int ScriptedBackend::max_observed_in_flight() const {
  std::lock_guard lock(mutex_);
  return max_in_flight_;
}

namespace {

ScriptRule rule_from_json(const json& j, const std::string& origin) {
  ScriptRule rule;
  if (j.contains("match")) {
    const json& m = j.at("match");
    if (m.contains("question_id")) rule.question_id = m.at("question_id").get<std::string>();
    if (m.contains("candidate_index")) rule.candidate_index = m.at("candidate_index").get<int>();
    if (m.contains("vote_index")) rule.vote_index = m.at("vote_index").get<int>();
    if (m.contains("attempt")) rule.attempt = m.at("attempt").get<int>();
    if (m.contains("purpose")) {
      auto p = purpose_from_string(m.at("purpose").get<std::string>());
      if (!p) throw ConfigError(origin + ": bad purpose in script rule");
      rule.purpose = *p;
    }
    if (m.contains("stage")) {
      auto s = stage_from_string(m.at("stage").get<std::string>());
      if (!s) throw ConfigError(origin + ": bad stage in script rule");
      rule.stage = *s;
    }
  }
  if (j.contains("response")) {
    rule.responses = {j.at("response").get<std::string>()};
  } else if (j.contains("responses")) {
    rule.responses = j.at("responses").get<std::vector<std::string>>();
  }
  if (j.contains("finish_reason")) {
    auto f = finish_reason_from_string(j.at("finish_reason").get<std::string>());
    if (!f) throw ConfigError(origin + ": bad finish_reason in script rule");
    rule.finish_reason = *f;
  }
  if (j.contains("fail_times")) rule.fail_times = j.at("fail_times").get<int>();
  if (j.contains("fail_kind")) rule.fail_kind = j.at("fail_kind").get<std::string>();
  return rule;
}

}  // namespace

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_json_text(const std::string& text,
                                                                 const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": script parse error: " + e.what());
  }
  auto backend = std::make_unique<ScriptedBackend>();
  if (j.contains("default")) backend->set_default(j.at("default").get<std::string>());
  if (j.contains("latency_ms")) backend->set_latency_ms(j.at("latency_ms").get<int>());
  if (j.contains("rules")) {
    for (const json& r : j.at("rules")) {
      backend->add_rule(rule_from_json(r, origin));
    }
  }
  return backend;
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(
    const std::filesystem::path& path) {
  return from_json_text(read_file(path), path.string());
}

}  // namespace selfcurate
