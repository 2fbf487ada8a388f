#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpss/errors.hpp"
#include "hpss/strategy.hpp"

namespace hpss {

// Factor ids with built-in rendering semantics. Spaces are data; the renderer
// resolves these ids and rejects unknown ones.
namespace factor_id {
inline constexpr const char* scoring_scale = "scoring_scale";
inline constexpr const char* in_context_examples = "in_context_examples";
inline constexpr const char* criteria = "criteria";
inline constexpr const char* reference = "reference";
inline constexpr const char* cot = "cot";
inline constexpr const char* autocot = "autocot";
inline constexpr const char* metrics = "metrics";
inline constexpr const char* order = "order";
}  // namespace factor_id

// The full 8-factor pointwise space (size 12,960). Baseline is the MT-Bench
// strategy: scale 1-5, no examples, human-written criteria, no reference,
// prefix CoT, no AutoCoT, no metrics, TD->ER->IC. The scale is the one
// baseline value that varies by dataset; override it with
// FactorSpace::with_baseline_value when the dataset declares its own.
inline const char* kPointwiseSpaceJson = R"json({
  "id": "pointwise_v1",
  "factors": [
    {"id": "scoring_scale", "name": "Scoring Scale", "values": ["3", "5", "10", "50", "100"]},
    {"id": "in_context_examples", "name": "In-Context Example", "values": ["0", "3", "5", "10"]},
    {"id": "criteria", "name": "Evaluation Criteria", "values": ["none", "human", "self_generated"]},
    {"id": "reference", "name": "Reference", "values": ["none", "self_generated", "dialectic"]},
    {"id": "cot", "name": "Chain-of-Thought", "values": ["none", "prefix", "suffix"]},
    {"id": "autocot", "name": "AutoCoT", "values": ["none", "autocot"]},
    {"id": "metrics", "name": "Metrics", "values": ["none", "metrics"]},
    {"id": "order", "name": "Order", "values": ["td_er_ic", "td_ic_er", "er_td_ic", "er_ic_td", "ic_td_er", "ic_er_td"]}
  ],
  "baseline": {
    "scoring_scale": "5",
    "in_context_examples": "0",
    "criteria": "human",
    "reference": "none",
    "cot": "prefix",
    "autocot": "none",
    "metrics": "none",
    "order": "td_er_ic"
  }
})json";

// Pairwise-comparison restriction: the Scoring Scale factor and the
// Self-Generated Criteria value do not apply and are removed.
inline const char* kPairwiseSpaceJson = R"json({
  "id": "pairwise_v1",
  "factors": [
    {"id": "in_context_examples", "name": "In-Context Example", "values": ["0", "3", "5", "10"]},
    {"id": "criteria", "name": "Evaluation Criteria", "values": ["none", "human"]},
    {"id": "reference", "name": "Reference", "values": ["none", "self_generated", "dialectic"]},
    {"id": "cot", "name": "Chain-of-Thought", "values": ["none", "prefix", "suffix"]},
    {"id": "autocot", "name": "AutoCoT", "values": ["none", "autocot"]},
    {"id": "metrics", "name": "Metrics", "values": ["none", "metrics"]},
    {"id": "order", "name": "Order", "values": ["td_er_ic", "td_ic_er", "er_td_ic", "er_ic_td", "ic_td_er", "ic_er_td"]}
  ],
  "baseline": {
    "in_context_examples": "0",
    "criteria": "human",
    "reference": "none",
    "cot": "prefix",
    "autocot": "none",
    "metrics": "none",
    "order": "td_er_ic"
  }
})json";

inline std::vector<std::string> space_preset_ids() { return {"pointwise_v1", "pairwise_v1"}; }

inline FactorSpace space_preset(const std::string& preset_id) {
  if (preset_id == "pointwise_v1") return space_from_json(nlohmann::json::parse(kPointwiseSpaceJson));
  if (preset_id == "pairwise_v1") return space_from_json(nlohmann::json::parse(kPairwiseSpaceJson));
  throw ConfigError("unknown space preset '" + preset_id + "'");
}

inline bool is_space_preset(const std::string& preset_id) {
  for (const auto& id : space_preset_ids()) {
    if (id == preset_id) return true;
  }
  return false;
}

}  // namespace hpss
