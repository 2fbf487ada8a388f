#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpss/errors.hpp"

namespace hpss {

enum class Grain { kDatasetLevel, kSampleLevel };
enum class JudgeMode { kPointwise, kPairwise };

// A unit to judge: named input text fields plus the human label.
struct RatingSample {
  std::string id;
  std::optional<std::string> group;
  std::map<std::string, std::string> fields;
  double human = 0.0;
};

// The labeled validation set and its evaluation contract.
struct Dataset {
  std::string id;
  std::string aspect;
  std::string criteria;  // human-written criteria text
  std::string task_family;
  Grain grain = Grain::kDatasetLevel;
  JudgeMode mode = JudgeMode::kPointwise;
  int native_scale = 5;  // max of the human rating scale (pointwise)
  std::optional<std::string> baseline_scale;  // value id for the space baseline
  std::vector<RatingSample> samples;

  const RatingSample& sample_by_id(const std::string& sample_id) const {
    for (const RatingSample& s : samples) {
      if (s.id == sample_id) return s;
    }
    throw StructuralError("dataset '" + id + "' has no sample '" + sample_id + "'");
  }

  void validate() const {
    if (samples.empty()) throw StructuralError("dataset '" + id + "' has no samples");
    if (mode == JudgeMode::kPointwise && native_scale < 2)
      throw StructuralError("pointwise dataset needs native_scale >= 2");
    if (grain == Grain::kSampleLevel) {
      for (const RatingSample& s : samples) {
        if (!s.group) throw StructuralError("sample-level dataset requires a group key on sample '" + s.id + "'");
      }
    }
  }
};

inline Grain grain_from_string(const std::string& s) {
  if (s == "dataset" || s == "dataset-level") return Grain::kDatasetLevel;
  if (s == "sample" || s == "sample-level") return Grain::kSampleLevel;
  throw ConfigError("unknown grain '" + s + "'");
}

inline JudgeMode mode_from_string(const std::string& s) {
  if (s == "pointwise") return JudgeMode::kPointwise;
  if (s == "pairwise") return JudgeMode::kPairwise;
  throw ConfigError("unknown mode '" + s + "'");
}

inline RatingSample sample_from_json(const nlohmann::json& j) {
  RatingSample s;
  s.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
  if (j.contains("group") && !j.at("group").is_null())
    s.group = j.at("group").is_string() ? j.at("group").get<std::string>() : j.at("group").dump();
  for (const auto& [key, value] : j.at("fields").items()) s.fields[key] = value.get<std::string>();
  s.human = j.at("human").get<double>();
  return s;
}

inline nlohmann::json sample_to_json(const RatingSample& s) {
  nlohmann::json j{{"id", s.id}, {"fields", s.fields}, {"human", s.human}};
  if (s.group) j["group"] = *s.group;
  return j;
}

// Descriptor JSON with either inline samples or a path to a JSONL file of
// records {id, group, fields:{...}, human}. Relative sample paths resolve
// against the descriptor's directory.
inline Dataset dataset_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  Dataset d;
  d.id = j.at("id").get<std::string>();
  d.aspect = j.at("aspect").get<std::string>();
  d.criteria = j.value("criteria", std::string{});
  d.task_family = j.at("task_family").get<std::string>();
  d.grain = grain_from_string(j.value("grain", std::string("dataset")));
  d.mode = mode_from_string(j.value("mode", std::string("pointwise")));
  d.native_scale = j.value("native_scale", 5);
  if (j.contains("baseline_scale")) d.baseline_scale = j.at("baseline_scale").get<std::string>();

  const auto& samples = j.at("samples");
  if (samples.is_array()) {
    for (const auto& sj : samples) d.samples.push_back(sample_from_json(sj));
  } else {
    std::filesystem::path path = samples.get<std::string>();
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open samples file '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        d.samples.push_back(sample_from_json(nlohmann::json::parse(line)));
      } catch (const nlohmann::json::exception& e) {
        throw StructuralError("samples file line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  d.validate();
  return d;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset '" + path.string() + "'");
  nlohmann::json j;
  in >> j;
  return dataset_from_json(j, path.parent_path());
}

}  // namespace hpss
