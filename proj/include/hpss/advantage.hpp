#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "hpss/errors.hpp"
#include "hpss/strategy.hpp"

namespace hpss {

// Per-value advantage estimates with their counters. A[i][j] estimates the
// fitness gain of fixing value j over drawing factor i uniformly; every
// factor's advantages are kept zero-mean. N counts targeted exploration
// observations (the moving-average weight), M counts appearances in any
// evaluated strategy, t counts evaluations so far. N and M track different
// events; neither bounds the other.
struct AdvantageTable {
  std::vector<std::vector<double>> advantage;      // A[i][j]
  std::vector<std::vector<std::int64_t>> explored; // N[i][j]
  std::vector<std::vector<std::int64_t>> appeared; // M[i][j]
  std::int64_t step = 0;                           // t

  static AdvantageTable zeros(const FactorSpace& space) {
    AdvantageTable t;
    t.advantage.resize(static_cast<std::size_t>(space.factor_count()));
    t.explored.resize(static_cast<std::size_t>(space.factor_count()));
    t.appeared.resize(static_cast<std::size_t>(space.factor_count()));
    for (int i = 0; i < space.factor_count(); ++i) {
      auto m = static_cast<std::size_t>(space.factor(i).size());
      t.advantage[static_cast<std::size_t>(i)].assign(m, 0.0);
      t.explored[static_cast<std::size_t>(i)].assign(m, 0);
      t.appeared[static_cast<std::size_t>(i)].assign(m, 0);
    }
    return t;
  }

  double total_advantage(const Strategy& s) const {
    double total = 0.0;
    for (std::size_t i = 0; i < advantage.size(); ++i)
      total += advantage[i][static_cast<std::size_t>(s.assignment.at(i))];
    return total;
  }

  // Bumps M for every value the evaluated strategy carries, and t.
  void record_appearance(const Strategy& s) {
    for (std::size_t i = 0; i < appeared.size(); ++i)
      ++appeared[i][static_cast<std::size_t>(s.assignment.at(i))];
    ++step;
  }

  void check_zero_mean(double tol = 1e-9) const {
    for (const auto& row : advantage) {
      double sum = 0.0;
      for (double a : row) sum += a;
      if (std::abs(sum) > tol) throw StructuralError("advantage row mean drifted: " + std::to_string(sum));
    }
  }
};

// Moving-average update for an exploration that changed factor i from value
// `old_value` to `new_value`, followed by zero-mean renormalization of the
// factor's row. The observed gain is measured against the parent's score with
// the parent value's own advantage backed out.
inline void update_advantage(AdvantageTable& table, int factor, int old_value, int new_value,
                             double score_new, double score_current) {
  auto i = static_cast<std::size_t>(factor);
  auto j = static_cast<std::size_t>(new_value);
  auto& row = table.advantage[i];
  double observed = score_new - (score_current - row[static_cast<std::size_t>(old_value)]);
  double n = static_cast<double>(table.explored[i][j]);
  row[j] = (row[j] * n + observed) / (n + 1.0);
  ++table.explored[i][j];
  double mean = 0.0;
  for (double a : row) mean += a;
  mean /= static_cast<double>(row.size());
  for (double& a : row) a -= mean;
}

// One candidate single-factor move with its sampling probability.
struct ExplorationCandidate {
  Neighbor neighbor;
  double bonus_score = 0.0;  // B before softmax; infinite for never-seen values
  double probability = 0.0;
};

struct SearchParams {
  double softmax_temperature = 5.0;  // tau
  double exploration_weight = 4.0;   // lambda
};

// Softmax over advantage disparity plus a UCB-style bonus. Values never seen
// (M = 0) take absolute priority: the first such neighbor in deterministic
// order gets probability 1. ln(t) is clamped at 0 for t <= 1.
inline std::vector<ExplorationCandidate> exploration_probabilities(const FactorSpace& space,
                                                                   const Strategy& current,
                                                                   const AdvantageTable& table,
                                                                   const SearchParams& params) {
  std::vector<Neighbor> moves = neighbors(space, current);
  if (moves.empty()) throw StructuralError("strategy has no neighbors");

  std::vector<ExplorationCandidate> out;
  out.reserve(moves.size());
  double log_t = table.step > 1 ? std::log(static_cast<double>(table.step)) : 0.0;

  int first_unseen = -1;
  for (std::size_t idx = 0; idx < moves.size(); ++idx) {
    const Neighbor& n = moves[idx];
    auto i = static_cast<std::size_t>(n.factor);
    ExplorationCandidate c{n, 0.0, 0.0};
    std::int64_t m = table.appeared[i][static_cast<std::size_t>(n.new_value)];
    if (m <= 0) {
      c.bonus_score = std::numeric_limits<double>::infinity();
      if (first_unseen < 0) first_unseen = static_cast<int>(idx);
    } else {
      double disparity = table.advantage[i][static_cast<std::size_t>(n.new_value)] -
                         table.advantage[i][static_cast<std::size_t>(n.old_value)];
      c.bonus_score = disparity + params.exploration_weight * std::sqrt(log_t / static_cast<double>(m));
    }
    out.push_back(std::move(c));
  }

  if (first_unseen >= 0) {
    out[static_cast<std::size_t>(first_unseen)].probability = 1.0;
    return out;
  }

  double max_b = -std::numeric_limits<double>::infinity();
  for (const auto& c : out) max_b = std::max(max_b, c.bonus_score);
  double total = 0.0;
  for (auto& c : out) {
    c.probability = std::exp((c.bonus_score - max_b) / params.softmax_temperature);
    total += c.probability;
  }
  for (auto& c : out) c.probability /= total;
  return out;
}

// Highest summed advantage over strategies outside `explored`, via lazy
// best-first enumeration of the separable objective. Ties break toward the
// lexicographically smaller assignment. Returns nullopt when the space is
// exhausted.
inline std::optional<Strategy> exploitation_pick(const FactorSpace& space, const AdvantageTable& table,
                                                 const std::unordered_set<std::string>& explored) {
  const int n = space.factor_count();

  // Per factor: value indices sorted by advantage descending, index ascending.
  std::vector<std::vector<int>> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& ord = order[static_cast<std::size_t>(i)];
    ord.resize(static_cast<std::size_t>(space.factor(i).size()));
    for (int j = 0; j < space.factor(i).size(); ++j) ord[static_cast<std::size_t>(j)] = j;
    const auto& row = table.advantage[static_cast<std::size_t>(i)];
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
      if (row[static_cast<std::size_t>(a)] != row[static_cast<std::size_t>(b)])
        return row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(b)];
      return a < b;
    });
  }

  // Frontier entries are rank vectors into `order`.
  struct Entry {
    double score;
    Strategy strategy;
    std::vector<int> ranks;
  };
  auto materialize = [&](const std::vector<int>& ranks) {
    Strategy s;
    s.assignment.resize(static_cast<std::size_t>(n));
    double score = 0.0;
    for (int i = 0; i < n; ++i) {
      int value = order[static_cast<std::size_t>(i)][static_cast<std::size_t>(ranks[static_cast<std::size_t>(i)])];
      s.assignment[static_cast<std::size_t>(i)] = value;
      score += table.advantage[static_cast<std::size_t>(i)][static_cast<std::size_t>(value)];
    }
    return Entry{score, std::move(s), ranks};
  };

  auto worse = [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score < b.score;
    return lex_less(b.strategy, a.strategy);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> frontier(worse);
  std::set<std::vector<int>> seen;

  std::vector<int> top(static_cast<std::size_t>(n), 0);
  frontier.push(materialize(top));
  seen.insert(top);

  while (!frontier.empty()) {
    Entry best = frontier.top();
    frontier.pop();
    if (!explored.contains(canonical_key(best.strategy))) return best.strategy;
    for (int i = 0; i < n; ++i) {
      if (best.ranks[static_cast<std::size_t>(i)] + 1 >= space.factor(i).size()) continue;
      std::vector<int> next = best.ranks;
      ++next[static_cast<std::size_t>(i)];
      if (seen.insert(next).second) frontier.push(materialize(next));
    }
  }
  return std::nullopt;
}

}  // namespace hpss
