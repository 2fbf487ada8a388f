#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpss/errors.hpp"

namespace hpss {

// One discrete axis of prompt design and its ordered value identifiers.
struct Factor {
  std::string id;
  std::string name;
  std::vector<std::string> values;

  int size() const { return static_cast<int>(values.size()); }

  int value_index(const std::string& value_id) const {
    for (int j = 0; j < size(); ++j) {
      if (values[j] == value_id) return j;
    }
    throw StructuralError("factor '" + id + "' has no value '" + value_id + "'");
  }
};

// One point in the factorized space: a value index per factor, in factor order.
struct Strategy {
  std::vector<int> assignment;

  bool operator==(const Strategy& other) const = default;
};

// Canonical, order-stable serialization of an assignment; the dedup key.
inline std::string canonical_key(const Strategy& s) {
  std::string key;
  for (std::size_t i = 0; i < s.assignment.size(); ++i) {
    if (i) key.push_back(',');
    key += std::to_string(s.assignment[i]);
  }
  return key;
}

inline Strategy strategy_from_key(const std::string& key) {
  Strategy s;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    std::size_t next = key.find(',', pos);
    if (next == std::string::npos) next = key.size();
    if (next == pos) throw StructuralError("bad strategy key '" + key + "'");
    s.assignment.push_back(std::stoi(key.substr(pos, next - pos)));
    pos = next + 1;
  }
  return s;
}

inline bool lex_less(const Strategy& a, const Strategy& b) {
  return std::lexicographical_compare(a.assignment.begin(), a.assignment.end(),
                                      b.assignment.begin(), b.assignment.end());
}

// A neighbor of a strategy together with the single coordinate it changes.
struct Neighbor {
  Strategy strategy;
  int factor;
  int old_value;
  int new_value;
};

// The discrete search space: an ordered factor list plus the baseline point.
class FactorSpace {
 public:
  FactorSpace() = default;
  FactorSpace(std::string id, std::vector<Factor> factors, Strategy baseline)
      : id_(std::move(id)), factors_(std::move(factors)), baseline_(std::move(baseline)) {
    validate();
  }

  const std::string& id() const { return id_; }
  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(int i) const { return factors_.at(static_cast<std::size_t>(i)); }
  int factor_count() const { return static_cast<int>(factors_.size()); }
  const Strategy& baseline() const { return baseline_; }

  int factor_index(const std::string& factor_id) const {
    for (int i = 0; i < factor_count(); ++i) {
      if (factors_[static_cast<std::size_t>(i)].id == factor_id) return i;
    }
    return -1;
  }

  bool valid(const Strategy& s) const {
    if (s.assignment.size() != factors_.size()) return false;
    for (int i = 0; i < factor_count(); ++i) {
      int j = s.assignment[static_cast<std::size_t>(i)];
      if (j < 0 || j >= factor(i).size()) return false;
    }
    return true;
  }

  void require_valid(const Strategy& s) const {
    if (!valid(s)) throw StructuralError("strategy does not fit space '" + id_ + "'");
  }

  std::uint64_t size() const {
    std::uint64_t total = 1;
    for (const Factor& f : factors_) total *= static_cast<std::uint64_t>(f.size());
    return total;
  }

  // Count of single-factor moves from any strategy: sum of (m_i - 1).
  int neighbor_count() const {
    int total = 0;
    for (const Factor& f : factors_) total += f.size() - 1;
    return total;
  }

  // Mixed-radix decode; index 0 is the all-zeros assignment and the last
  // factor varies fastest, so ascending indices are lexicographic order.
  Strategy strategy_at(std::uint64_t index) const {
    Strategy s;
    s.assignment.resize(factors_.size());
    for (int i = factor_count() - 1; i >= 0; --i) {
      auto m = static_cast<std::uint64_t>(factor(i).size());
      s.assignment[static_cast<std::size_t>(i)] = static_cast<int>(index % m);
      index /= m;
    }
    return s;
  }

  std::uint64_t index_of(const Strategy& s) const {
    require_valid(s);
    std::uint64_t index = 0;
    for (int i = 0; i < factor_count(); ++i) {
      index = index * static_cast<std::uint64_t>(factor(i).size()) +
              static_cast<std::uint64_t>(s.assignment[static_cast<std::size_t>(i)]);
    }
    return index;
  }

  // Returns a copy with the baseline moved to `value_id` for one factor.
  FactorSpace with_baseline_value(const std::string& factor_id, const std::string& value_id) const {
    int i = factor_index(factor_id);
    if (i < 0) throw StructuralError("space '" + id_ + "' has no factor '" + factor_id + "'");
    FactorSpace out = *this;
    out.baseline_.assignment[static_cast<std::size_t>(i)] = factor(i).value_index(value_id);
    return out;
  }

 private:
  void validate() const {
    std::unordered_set<std::string> factor_ids;
    for (const Factor& f : factors_) {
      if (f.values.empty()) throw StructuralError("factor '" + f.id + "' has no values");
      if (!factor_ids.insert(f.id).second) throw StructuralError("duplicate factor id '" + f.id + "'");
      std::unordered_set<std::string> value_ids(f.values.begin(), f.values.end());
      if (value_ids.size() != f.values.size())
        throw StructuralError("duplicate value id in factor '" + f.id + "'");
    }
    if (!valid(baseline_)) throw StructuralError("baseline invalid for space '" + id_ + "'");
  }

  std::string id_;
  std::vector<Factor> factors_;
  Strategy baseline_;
};

// All strategies differing from `s` in exactly one factor, factor-major and
// value-minor, skipping the current value. Deterministic order.
inline std::vector<Neighbor> neighbors(const FactorSpace& space, const Strategy& s) {
  space.require_valid(s);
  std::vector<Neighbor> out;
  out.reserve(static_cast<std::size_t>(space.neighbor_count()));
  for (int i = 0; i < space.factor_count(); ++i) {
    int current = s.assignment[static_cast<std::size_t>(i)];
    for (int j = 0; j < space.factor(i).size(); ++j) {
      if (j == current) continue;
      Neighbor n{s, i, current, j};
      n.strategy.assignment[static_cast<std::size_t>(i)] = j;
      out.push_back(std::move(n));
    }
  }
  return out;
}

// The baseline followed by every single-factor perturbation of it.
inline std::vector<Strategy> init_perturbations(const FactorSpace& space) {
  std::vector<Strategy> out;
  out.push_back(space.baseline());
  for (const Neighbor& n : neighbors(space, space.baseline())) out.push_back(n.strategy);
  return out;
}

// Lexicographic enumeration of the whole space.
class StrategyEnumerator {
 public:
  explicit StrategyEnumerator(const FactorSpace& space) : space_(&space), index_(0) {}

  bool next(Strategy& out) {
    if (index_ >= space_->size()) return false;
    out = space_->strategy_at(index_++);
    return true;
  }

 private:
  const FactorSpace* space_;
  std::uint64_t index_;
};

// --- space/strategy files -------------------------------------------------

inline nlohmann::json space_to_json(const FactorSpace& space) {
  nlohmann::json factors = nlohmann::json::array();
  for (const Factor& f : space.factors()) {
    factors.push_back({{"id", f.id}, {"name", f.name}, {"values", f.values}});
  }
  nlohmann::json baseline = nlohmann::json::object();
  for (int i = 0; i < space.factor_count(); ++i) {
    const Factor& f = space.factor(i);
    baseline[f.id] = f.values[static_cast<std::size_t>(space.baseline().assignment[static_cast<std::size_t>(i)])];
  }
  return {{"id", space.id()}, {"factors", factors}, {"baseline", baseline}};
}

inline FactorSpace space_from_json(const nlohmann::json& j) {
  std::vector<Factor> factors;
  for (const auto& fj : j.at("factors")) {
    Factor f;
    f.id = fj.at("id").get<std::string>();
    f.name = fj.value("name", f.id);
    f.values = fj.at("values").get<std::vector<std::string>>();
    factors.push_back(std::move(f));
  }
  const auto& bj = j.at("baseline");
  Strategy baseline;
  for (const Factor& f : factors) {
    if (!bj.contains(f.id)) throw StructuralError("baseline missing factor '" + f.id + "'");
    baseline.assignment.push_back(f.value_index(bj.at(f.id).get<std::string>()));
  }
  return FactorSpace(j.value("id", std::string("custom")), std::move(factors), std::move(baseline));
}

// Strategy file format: a flat object mapping factor id -> value id.
inline nlohmann::json strategy_to_json(const FactorSpace& space, const Strategy& s) {
  space.require_valid(s);
  nlohmann::json out = nlohmann::json::object();
  for (int i = 0; i < space.factor_count(); ++i) {
    const Factor& f = space.factor(i);
    out[f.id] = f.values[static_cast<std::size_t>(s.assignment[static_cast<std::size_t>(i)])];
  }
  return out;
}

inline Strategy strategy_from_json(const FactorSpace& space, const nlohmann::json& j) {
  Strategy s;
  for (const Factor& f : space.factors()) {
    if (!j.contains(f.id)) throw StructuralError("strategy missing factor '" + f.id + "'");
    s.assignment.push_back(f.value_index(j.at(f.id).get<std::string>()));
  }
  return s;
}

}  // namespace hpss
