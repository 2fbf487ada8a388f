#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

#include "hpss/errors.hpp"

namespace hpss {

// All search hyperparameters. Defaults follow the reference configuration:
// population 5, 2 mutations per member, exploitation probability 0.2,
// softmax temperature 5, exploration bonus weight 4, budget 71.
struct SearchConfig {
  int population_size = 5;        // k
  int mutations_per_member = 2;   // g
  double exploit_probability = 0.2;  // rho
  double softmax_temperature = 5.0;  // tau
  double exploration_weight = 4.0;   // lambda
  int budget = 71;                // m, hard cap on fitness evaluations
  std::uint64_t seed = 0;
  int greedy_candidates = 5;      // perturbations per greedy iteration

  void validate() const {
    if (population_size < 1) throw ConfigError("population_size must be >= 1");
    if (mutations_per_member < 1) throw ConfigError("mutations_per_member must be >= 1");
    if (exploit_probability < 0.0 || exploit_probability > 1.0)
      throw ConfigError("exploit_probability must be in [0, 1]");
    if (softmax_temperature <= 0.0) throw ConfigError("softmax_temperature must be > 0");
    if (exploration_weight < 0.0) throw ConfigError("exploration_weight must be >= 0");
    if (budget < 1) throw ConfigError("budget must be >= 1");
    if (greedy_candidates < 1) throw ConfigError("greedy_candidates must be >= 1");
  }
};

inline nlohmann::json config_to_json(const SearchConfig& c) {
  return {{"population_size", c.population_size},
          {"mutations_per_member", c.mutations_per_member},
          {"exploit_probability", c.exploit_probability},
          {"softmax_temperature", c.softmax_temperature},
          {"exploration_weight", c.exploration_weight},
          {"budget", c.budget},
          {"seed", c.seed},
          {"greedy_candidates", c.greedy_candidates}};
}

inline SearchConfig config_from_json(const nlohmann::json& j) {
  SearchConfig c;
  c.population_size = j.value("population_size", c.population_size);
  c.mutations_per_member = j.value("mutations_per_member", c.mutations_per_member);
  c.exploit_probability = j.value("exploit_probability", c.exploit_probability);
  c.softmax_temperature = j.value("softmax_temperature", c.softmax_temperature);
  c.exploration_weight = j.value("exploration_weight", c.exploration_weight);
  c.budget = j.value("budget", c.budget);
  c.seed = j.value("seed", c.seed);
  c.greedy_candidates = j.value("greedy_candidates", c.greedy_candidates);
  c.validate();
  return c;
}

}  // namespace hpss
