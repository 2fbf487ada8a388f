#pragma once

#include <algorithm>
#include <cstdint>
#include <ctime>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hpss/advantage.hpp"
#include "hpss/backend.hpp"
#include "hpss/config.hpp"
#include "hpss/errors.hpp"
#include "hpss/journal.hpp"
#include "hpss/rng.hpp"
#include "hpss/strategy.hpp"

namespace hpss {

struct Evaluated {
  Strategy strategy;
  double score = 0.0;
  int journal_index = 0;
};

// The top-k population: unique strategies ordered by score descending, ties
// toward the earlier evaluation.
class Population {
 public:
  explicit Population(int capacity) : capacity_(capacity) {}

  void add(const Evaluated& e) {
    std::string key = canonical_key(e.strategy);
    for (const Evaluated& existing : members_) {
      if (canonical_key(existing.strategy) == key) return;
    }
    members_.push_back(e);
    std::stable_sort(members_.begin(), members_.end(), [](const Evaluated& a, const Evaluated& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.journal_index < b.journal_index;
    });
    if (static_cast<int>(members_.size()) > capacity_) members_.resize(static_cast<std::size_t>(capacity_));
  }

  const std::vector<Evaluated>& members() const { return members_; }
  bool empty() const { return members_.empty(); }

 private:
  int capacity_;
  std::vector<Evaluated> members_;
};

enum class SearchStatus { kComplete, kSuspended };

struct SearchOutcome {
  SearchStatus status = SearchStatus::kComplete;
  Strategy best;
  double best_score = 0.0;
  int evaluations = 0;
  bool space_exhausted = false;
  Population population{1};
  AdvantageTable table;
};

namespace detail {

// Evaluation funnel shared by every algorithm. While the journal still holds
// records (a resumed run), decisions recomputed by the caller are checked
// against them and their scores are replayed without touching the backend;
// past the prefix, the backend is consulted and the journal extended. A
// BackendError leaves the journal durable and surfaces as a suspension.
// The explored set is built strictly as evaluations happen, never ahead of
// them, so replayed decisions see exactly the state the original run saw.
class EvalContext {
 public:
  EvalContext(FitnessBackend* backend, const SearchConfig& config, RunJournal& journal,
              bool stamp_records)
      : backend_(backend), config_(config), journal_(journal), stamp_(stamp_records) {}

  int cost() const { return cost_; }
  bool budget_left() const { return cost_ < config_.budget; }
  const std::unordered_set<std::string>& explored() const { return explored_; }
  bool is_explored(const Strategy& s) const { return explored_.contains(canonical_key(s)); }

  double evaluate(const Strategy& s, const std::string& kind,
                  std::optional<std::string> modified_factor = std::nullopt) {
    if (cost_ >= config_.budget) throw StructuralError("evaluation past budget");
    double score = 0.0;
    if (static_cast<std::size_t>(cost_) < journal_.size()) {
      const JournalRecord& r = journal_.at(static_cast<std::size_t>(cost_));
      if (r.kind != kind)
        throw IntegrityError("expected kind '" + kind + "', found '" + r.kind + "'",
                             static_cast<std::size_t>(cost_) + 1);
      if (canonical_key(r.strategy) != canonical_key(s))
        throw IntegrityError("expected strategy " + canonical_key(s) + ", found " +
                                 canonical_key(r.strategy),
                             static_cast<std::size_t>(cost_) + 1);
      score = r.score;
    } else {
      score = backend_->evaluate(s);
      JournalRecord r;
      r.step = cost_;
      r.kind = kind;
      r.strategy = s;
      r.modified_factor = std::move(modified_factor);
      r.score = score;
      r.seed = config_.seed;
      if (stamp_) r.timestamp = now_iso8601();
      journal_.append_and_sync(r);
    }
    explored_.insert(canonical_key(s));
    ++cost_;
    return score;
  }

  SearchOutcome finish(const Population& population, AdvantageTable table, bool exhausted,
                       SearchStatus status) const {
    SearchOutcome out;
    out.status = status;
    out.evaluations = cost_;
    out.space_exhausted = exhausted;
    out.population = population;
    out.table = std::move(table);
    if (!journal_.empty()) {
      const JournalRecord& best = journal_.best_record();
      out.best = best.strategy;
      out.best_score = best.score;
    }
    return out;
  }

 private:
  static std::string now_iso8601() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
  }

  FitnessBackend* backend_;
  const SearchConfig& config_;
  RunJournal& journal_;
  bool stamp_;
  std::unordered_set<std::string> explored_;
  int cost_ = 0;
};

// Uniform unexplored strategy: rejection sampling with a cap, then a linear
// scan from a random offset so the fallback always terminates.
inline std::optional<Strategy> uniform_unexplored(const FactorSpace& space, Rng& rng,
                                                  const std::unordered_set<std::string>& explored) {
  const std::uint64_t size = space.size();
  if (explored.size() >= size) return std::nullopt;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Strategy s = space.strategy_at(uniform_below(rng, size));
    if (!explored.contains(canonical_key(s))) return s;
  }
  std::uint64_t start = uniform_below(rng, size);
  for (std::uint64_t offset = 0; offset < size; ++offset) {
    Strategy s = space.strategy_at((start + offset) % size);
    if (!explored.contains(canonical_key(s))) return s;
  }
  return std::nullopt;
}

}  // namespace detail

// Evaluates the baseline and every single-factor perturbation of it, then
// seeds the advantage table: A[i][j] = s_ij - mean_k(s_ik), where the
// baseline value's score is the baseline's own evaluation. Every observed
// value starts with one exploration observation.
inline void initialize_search(const FactorSpace& space, const SearchConfig& config,
                              detail::EvalContext& ctx, Population& population, AdvantageTable& table) {
  const int init_cost = 1 + space.neighbor_count();
  if (config.budget < init_cost)
    throw ConfigError("budget " + std::to_string(config.budget) + " below initialization cost " +
                      std::to_string(init_cost));

  const Strategy& base = space.baseline();
  double base_score = ctx.evaluate(base, "init");
  table.record_appearance(base);
  population.add({base, base_score, 0});

  std::vector<std::vector<double>> factor_scores(static_cast<std::size_t>(space.factor_count()));
  for (int i = 0; i < space.factor_count(); ++i) {
    factor_scores[static_cast<std::size_t>(i)]
        .assign(static_cast<std::size_t>(space.factor(i).size()), 0.0);
    factor_scores[static_cast<std::size_t>(i)]
        [static_cast<std::size_t>(base.assignment[static_cast<std::size_t>(i)])] = base_score;
  }

  for (const Neighbor& n : neighbors(space, base)) {
    int idx = ctx.cost();
    double score = ctx.evaluate(n.strategy, "init", space.factor(n.factor).id);
    table.record_appearance(n.strategy);
    population.add({n.strategy, score, idx});
    factor_scores[static_cast<std::size_t>(n.factor)][static_cast<std::size_t>(n.new_value)] = score;
  }

  for (int i = 0; i < space.factor_count(); ++i) {
    const auto& scores = factor_scores[static_cast<std::size_t>(i)];
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(scores.size());
    for (int j = 0; j < space.factor(i).size(); ++j) {
      table.advantage[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = scores[static_cast<std::size_t>(j)] - mean;
      table.explored[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    }
  }
  table.check_zero_mean();
}

// The full heuristic search: initialization, then sweeps where each
// population member gets g mutation slots. A slot samples a single-factor
// exploration move (softmax over advantage disparity + UCB bonus); explored
// samples are re-drawn a bounded number of times, then the slot falls back to
// the exploitation pick and finally to a uniform unexplored strategy. With
// probability rho the slot is overridden by the exploitation pick outright.
// Only genuine exploration moves update the advantage estimates.
inline SearchOutcome hpss_search(const FactorSpace& space, FitnessBackend& backend,
                                 const SearchConfig& config, RunJournal& journal,
                                 bool stamp_records = false) {
  config.validate();
  journal.set_space(&space);
  detail::EvalContext ctx(&backend, config, journal, stamp_records);
  Rng rng(splitmix64(config.seed));
  SearchParams params{config.softmax_temperature, config.exploration_weight};

  Population population(config.population_size);
  AdvantageTable table = AdvantageTable::zeros(space);
  bool exhausted = false;

  try {
    initialize_search(space, config, ctx, population, table);

    while (ctx.budget_left() && !exhausted) {
      Population next = population;
      std::vector<Evaluated> members = population.members();
      for (const Evaluated& member : members) {
        if (!ctx.budget_left() || exhausted) break;
        for (int slot = 0; slot < config.mutations_per_member && ctx.budget_left(); ++slot) {
          // Exploration: re-draw past duplicates, bounded by the neighborhood size.
          std::optional<Neighbor> move;
          auto candidates = exploration_probabilities(space, member.strategy, table, params);
          std::vector<double> masses(candidates.size());
          for (std::size_t c = 0; c < candidates.size(); ++c) masses[c] = candidates[c].probability;
          for (int attempt = 0; attempt < space.neighbor_count(); ++attempt) {
            const auto& pick = candidates[sample_index(rng, masses)];
            if (!ctx.is_explored(pick.neighbor.strategy)) {
              move = pick.neighbor;
              break;
            }
          }

          bool exploit = bernoulli(rng, config.exploit_probability);
          std::optional<Strategy> target;
          std::string kind;
          std::optional<std::string> modified;

          if (exploit) {
            if (auto picked = exploitation_pick(space, table, ctx.explored())) {
              target = *picked;
              kind = "exploit";
            }
          }
          if (!target && move) {
            target = move->strategy;
            kind = "explore";
            modified = space.factor(move->factor).id;
          }
          if (!target) {
            // Neighborhood fully explored and no exploitation override fired.
            if (auto picked = exploitation_pick(space, table, ctx.explored())) {
              target = *picked;
              kind = "exploit";
            } else if (auto uniform = detail::uniform_unexplored(space, rng, ctx.explored())) {
              target = *uniform;
              kind = "exploit";
            } else {
              exhausted = true;
              break;
            }
          }

          int idx = ctx.cost();
          double score = ctx.evaluate(*target, kind, modified);
          table.record_appearance(*target);
          if (kind == "explore") {
            update_advantage(table, move->factor, move->old_value, move->new_value, score, member.score);
            table.check_zero_mean();
          }
          next.add({*target, score, idx});
        }
      }
      population = next;
    }
  } catch (const BackendError&) {
    return ctx.finish(population, std::move(table), exhausted, SearchStatus::kSuspended);
  }
  return ctx.finish(population, std::move(table), exhausted, SearchStatus::kComplete);
}

// Uniform single-factor perturbations of the incumbent; the best candidate of
// each iteration (if it beats the incumbent) becomes the next incumbent.
// Draws landing on already-evaluated strategies reuse the known score without
// consuming budget. A run whose incumbent neighborhood is fully explored with
// no improving neighbor is converged and stops: plain greedy stays trapped in
// local optima by construction.
inline SearchOutcome greedy_search(const FactorSpace& space, FitnessBackend& backend,
                                   const SearchConfig& config, RunJournal& journal,
                                   bool stamp_records = false) {
  config.validate();
  journal.set_space(&space);
  detail::EvalContext ctx(&backend, config, journal, stamp_records);
  Rng rng(splitmix64(config.seed));
  Population population(1);
  bool exhausted = false;
  std::unordered_map<std::string, double> known;

  try {
    Strategy current = space.baseline();
    double current_score = ctx.evaluate(current, "greedy");
    known.emplace(canonical_key(current), current_score);
    population.add({current, current_score, 0});

    while (ctx.budget_left()) {
      auto moves = neighbors(space, current);
      if (moves.empty()) break;

      // Converged: every neighbor is known and none beats the incumbent.
      bool progress_possible = false;
      for (const Neighbor& n : moves) {
        auto it = known.find(canonical_key(n.strategy));
        if (it == known.end() || it->second > current_score) {
          progress_possible = true;
          break;
        }
      }
      if (!progress_possible) {
        exhausted = true;
        break;
      }

      Strategy best_candidate;
      double best_score = -std::numeric_limits<double>::infinity();
      bool any = false;
      for (int c = 0; c < config.greedy_candidates; ++c) {
        const Neighbor& n = moves[uniform_below(rng, moves.size())];
        std::string key = canonical_key(n.strategy);
        double score = 0.0;
        if (auto it = known.find(key); it != known.end()) {
          score = it->second;  // duplicate draw, no budget spent
        } else {
          if (!ctx.budget_left()) break;
          int idx = ctx.cost();
          score = ctx.evaluate(n.strategy, "greedy");
          known.emplace(std::move(key), score);
          population.add({n.strategy, score, idx});
        }
        if (!any || score > best_score) {
          best_candidate = n.strategy;
          best_score = score;
          any = true;
        }
      }
      if (any && best_score > current_score) {
        current = best_candidate;
        current_score = best_score;
      }
    }
  } catch (const BackendError&) {
    return ctx.finish(population, AdvantageTable{}, exhausted, SearchStatus::kSuspended);
  }
  return ctx.finish(population, AdvantageTable{}, exhausted, SearchStatus::kComplete);
}

// Coordinate descent in factor order: every alternative value of the current
// factor is evaluated with the rest frozen, and the best (including the
// incumbent value, whose score is already known) is fixed before moving on.
inline SearchOutcome stepwise_greedy_search(const FactorSpace& space, FitnessBackend& backend,
                                            const SearchConfig& config, RunJournal& journal,
                                            bool stamp_records = false) {
  config.validate();
  journal.set_space(&space);
  detail::EvalContext ctx(&backend, config, journal, stamp_records);
  Population population(1);

  try {
    Strategy current = space.baseline();
    double current_score = ctx.evaluate(current, "stepwise");
    population.add({current, current_score, 0});

    for (int i = 0; i < space.factor_count() && ctx.budget_left(); ++i) {
      int best_value = current.assignment[static_cast<std::size_t>(i)];
      double best_score = current_score;
      for (int j = 0; j < space.factor(i).size() && ctx.budget_left(); ++j) {
        if (j == current.assignment[static_cast<std::size_t>(i)]) continue;
        Strategy candidate = current;
        candidate.assignment[static_cast<std::size_t>(i)] = j;
        int idx = ctx.cost();
        double score = ctx.evaluate(candidate, "stepwise", space.factor(i).id);
        population.add({candidate, score, idx});
        if (score > best_score) {
          best_value = j;
          best_score = score;
        }
      }
      current.assignment[static_cast<std::size_t>(i)] = best_value;
      current_score = best_score;
    }
  } catch (const BackendError&) {
    return ctx.finish(population, AdvantageTable{}, false, SearchStatus::kSuspended);
  }
  return ctx.finish(population, AdvantageTable{}, false, SearchStatus::kComplete);
}

// Budget uniform draws without replacement.
inline SearchOutcome random_search(const FactorSpace& space, FitnessBackend& backend,
                                   const SearchConfig& config, RunJournal& journal,
                                   bool stamp_records = false) {
  config.validate();
  journal.set_space(&space);
  detail::EvalContext ctx(&backend, config, journal, stamp_records);
  Rng rng(splitmix64(config.seed));
  Population population(1);
  bool exhausted = false;

  try {
    while (ctx.budget_left()) {
      auto candidate = detail::uniform_unexplored(space, rng, ctx.explored());
      if (!candidate) {
        exhausted = true;
        break;
      }
      int idx = ctx.cost();
      double score = ctx.evaluate(*candidate, "random");
      population.add({*candidate, score, idx});
    }
  } catch (const BackendError&) {
    return ctx.finish(population, AdvantageTable{}, exhausted, SearchStatus::kSuspended);
  }
  return ctx.finish(population, AdvantageTable{}, exhausted, SearchStatus::kComplete);
}

inline SearchOutcome run_algorithm(const std::string& algorithm, const FactorSpace& space,
                                   FitnessBackend& backend, const SearchConfig& config,
                                   RunJournal& journal, bool stamp_records = false) {
  if (algorithm == "hpss") return hpss_search(space, backend, config, journal, stamp_records);
  if (algorithm == "greedy") return greedy_search(space, backend, config, journal, stamp_records);
  if (algorithm == "stepwise") return stepwise_greedy_search(space, backend, config, journal, stamp_records);
  if (algorithm == "random") return random_search(space, backend, config, journal, stamp_records);
  throw ConfigError("unknown algorithm '" + algorithm + "'");
}

// Rebuilds in-memory state from a journal by re-executing the run with a
// backend that refuses new evaluations. A journal of a finished run
// reconstructs to completion; a prefix reconstructs to a suspension at
// exactly the recorded evaluation count.
inline SearchOutcome reconstruct(const std::string& algorithm, const FactorSpace& space,
                                 const SearchConfig& config, const std::vector<JournalRecord>& records) {
  RunJournal scratch;
  scratch.adopt(records);
  SuspendingBackend none;
  return run_algorithm(algorithm, space, none, config, scratch);
}

}  // namespace hpss
