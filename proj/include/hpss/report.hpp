#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpss/advantage.hpp"
#include "hpss/config.hpp"
#include "hpss/journal.hpp"
#include "hpss/search.hpp"
#include "hpss/strategy.hpp"

namespace hpss {

// Convergence data: one row per evaluation with the running best.
inline std::string curve_csv(const std::vector<JournalRecord>& records) {
  std::ostringstream out;
  out << "step,kind,score,best_so_far\n";
  double best = -std::numeric_limits<double>::infinity();
  out.precision(17);
  for (const JournalRecord& r : records) {
    best = std::max(best, r.score);
    out << r.step << "," << r.kind << "," << r.score << "," << best << "\n";
  }
  return out.str();
}

// Per-value advantage rows with exploration/appearance counters, the shape of
// the final state a run converged to.
inline nlohmann::json advantage_report(const FactorSpace& space, const AdvantageTable& table) {
  nlohmann::json factors = nlohmann::json::array();
  for (int i = 0; i < space.factor_count(); ++i) {
    const Factor& f = space.factor(i);
    nlohmann::json values = nlohmann::json::array();
    double row_sum = 0.0;
    for (int j = 0; j < f.size(); ++j) {
      auto si = static_cast<std::size_t>(i);
      auto sj = static_cast<std::size_t>(j);
      row_sum += table.advantage[si][sj];
      values.push_back({{"value", f.values[sj]},
                        {"advantage", table.advantage[si][sj]},
                        {"explored", table.explored[si][sj]},
                        {"appeared", table.appeared[si][sj]}});
    }
    factors.push_back({{"factor", f.id},
                       {"name", f.name},
                       {"values", values},
                       {"zero_mean_residual", row_sum}});
  }
  return {{"step", table.step}, {"factors", factors}};
}

struct RunReport {
  std::string algorithm;
  SearchStatus status = SearchStatus::kComplete;
  int evaluations = 0;
  Strategy best;
  double best_score = 0.0;
  nlohmann::json best_strategy_json;
  nlohmann::json advantage;  // null for algorithms without a table
  std::string curve;

  nlohmann::json to_json() const {
    nlohmann::json j{{"algorithm", algorithm},
                     {"status", status == SearchStatus::kComplete ? "complete" : "suspended"},
                     {"evaluations", evaluations},
                     {"best_score", best_score},
                     {"best_strategy", best_strategy_json}};
    if (!advantage.is_null()) j["advantage"] = advantage;
    return j;
  }
};

// Rebuilds the run's final state from its journal and packages it. Works on
// complete and suspended journals alike; the advantage section exists only
// for the heuristic search.
inline RunReport build_report(const std::string& algorithm, const FactorSpace& space,
                              const SearchConfig& config, const std::vector<JournalRecord>& records) {
  SearchOutcome outcome = reconstruct(algorithm, space, config, records);
  RunReport report;
  report.algorithm = algorithm;
  report.status = records.empty() ? SearchStatus::kSuspended : outcome.status;
  report.evaluations = outcome.evaluations;
  report.best = outcome.best;
  report.best_score = outcome.best_score;
  if (!records.empty()) report.best_strategy_json = strategy_to_json(space, outcome.best);
  if (algorithm == "hpss" && !records.empty()) {
    report.advantage = advantage_report(space, outcome.table);
  }
  report.curve = curve_csv(records);
  return report;
}

}  // namespace hpss
