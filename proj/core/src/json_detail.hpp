#pragma once

#include <nlohmann/json.hpp>

#include "selfcurate/ledger.hpp"
#include "selfcurate/verifier.hpp"

namespace selfcurate::detail {

using ojson = nlohmann::ordered_json;

ojson record_to_json(const VerificationRecord& record);
VerificationRecord record_from_json(const ojson& j, const std::string& question_id,
                                    int candidate_index);

}  // namespace selfcurate::detail
