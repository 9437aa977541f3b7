// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include "json.hpp"

#include "aabsp/datalab.hpp"
#include "aabsp/optimizer.hpp"
#include "aabsp/risk.hpp"

namespace aabsp::cli {

using nlohmann::json;

// Stable field names mirroring the library structs.  Doubles are written in
// shortest round-trip form, so reading a document back gives identical bits.
json to_json(const Plan& plan);
json to_json(const PlanEvaluation& eval);
json to_json(const OptResult& result);
json to_json(const MleResult& fit);
json to_json(const SuffStats& stats);

Plan plan_from_json(const json& j);
PlanEvaluation evaluation_from_json(const json& j);
OptResult opt_result_from_json(const json& j);

// Human-readable layouts.
void print_evaluation(std::ostream& out, const Plan& plan, const PlanEvaluation& eval);
void print_opt_result(std::ostream& out, const OptResult& result);
// One row per mode plus the relative risk savings, as in a comparison table.
void print_comparisons(std::ostream& out, const Comparisons& cmp);

std::string format_plan(const Plan& plan);

}  // namespace aabsp::cli
