#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpss/errors.hpp"
#include "hpss/rng.hpp"
#include "hpss/strategy.hpp"

namespace hpss {

// Desk-scale fitness oracle: per-value weights, sparse pairwise interaction
// terms, and optional frozen Gaussian noise.
struct SyntheticLandscape {
  struct Interaction {
    int factor_a = 0;
    int value_a = 0;
    int factor_b = 0;
    int value_b = 0;
    double weight = 0.0;
  };

  std::vector<std::vector<double>> weights;  // [factor][value]
  std::vector<Interaction> interactions;
  double sigma = 0.0;

  void require_fits(const FactorSpace& space) const {
    if (weights.size() != static_cast<std::size_t>(space.factor_count()))
      throw StructuralError("landscape factor count mismatch");
    for (int i = 0; i < space.factor_count(); ++i) {
      if (weights[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(space.factor(i).size()))
        throw StructuralError("landscape value count mismatch on factor " + std::to_string(i));
    }
  }
};

// Separable sum + matching interaction terms + frozen noise. The noise is a
// pure function of (seed, canonical strategy key): re-evaluating one strategy
// within a run always yields the same score.
inline double synthetic_fitness(const SyntheticLandscape& land, const Strategy& s, std::uint64_t seed) {
  double total = 0.0;
  for (std::size_t i = 0; i < land.weights.size(); ++i) {
    total += land.weights[i][static_cast<std::size_t>(s.assignment.at(i))];
  }
  for (const auto& u : land.interactions) {
    if (s.assignment.at(static_cast<std::size_t>(u.factor_a)) == u.value_a &&
        s.assignment.at(static_cast<std::size_t>(u.factor_b)) == u.value_b) {
      total += u.weight;
    }
  }
  if (land.sigma > 0.0) {
    total += land.sigma * seeded_normal(seed, fnv1a64(canonical_key(s)));
  }
  return total;
}

// Weights drawn uniformly from [-1, 1]; no interactions. Coordinate-wise
// argmax is the global optimum by construction.
inline SyntheticLandscape make_separable_landscape(const FactorSpace& space, std::uint64_t seed) {
  Rng rng(splitmix64(seed));
  SyntheticLandscape land;
  land.weights.resize(static_cast<std::size_t>(space.factor_count()));
  for (int i = 0; i < space.factor_count(); ++i) {
    auto& row = land.weights[static_cast<std::size_t>(i)];
    row.resize(static_cast<std::size_t>(space.factor(i).size()));
    for (double& w : row) w = 2.0 * uniform_double(rng) - 1.0;
  }
  return land;
}

// Separable base plus cross-factor interaction terms whose magnitude matches
// the weight range. One interaction is a deliberate trap: it rewards a
// coordinated two-factor move off the separable argmax by more than the two
// single-factor drops it costs, so the separable optimum is a local optimum
// that single-factor hill climbing cannot leave. The remaining `pairs - 1`
// interactions are random texture.
inline SyntheticLandscape make_interacting_landscape(const FactorSpace& space, std::uint64_t seed,
                                                     int pairs = -1) {
  if (space.factor_count() < 2) throw StructuralError("interacting landscape needs >= 2 factors");
  SyntheticLandscape land = make_separable_landscape(space, seed);
  Rng rng(splitmix64(seed ^ 0xabcdef123456ULL));
  if (pairs < 0) pairs = space.factor_count();

  auto runner_up = [&](int factor) {
    const auto& row = land.weights[static_cast<std::size_t>(factor)];
    int top = 0, second = -1;
    for (int j = 1; j < static_cast<int>(row.size()); ++j) {
      if (row[static_cast<std::size_t>(j)] > row[static_cast<std::size_t>(top)]) {
        second = top;
        top = j;
      } else if (second < 0 || row[static_cast<std::size_t>(j)] > row[static_cast<std::size_t>(second)]) {
        second = j;
      }
    }
    return std::pair<int, int>{top, second};
  };

  // Trap on the two multi-valued factors with the smallest top-two gaps: the
  // cheapest coordinated move, and the hardest trap to distinguish from the
  // separable optimum.
  std::vector<std::pair<double, int>> gaps;
  for (int i = 0; i < space.factor_count(); ++i) {
    if (space.factor(i).size() < 2) continue;
    auto [top, second] = runner_up(i);
    const auto& row = land.weights[static_cast<std::size_t>(i)];
    gaps.push_back({row[static_cast<std::size_t>(top)] - row[static_cast<std::size_t>(second)], i});
  }
  if (gaps.size() >= 2) {
    std::sort(gaps.begin(), gaps.end());
    int fa = gaps[0].second, fb = gaps[1].second;
    if (fa > fb) std::swap(fa, fb);
    auto [top_a, second_a] = runner_up(fa);
    auto [top_b, second_b] = runner_up(fb);
    double margin = 0.1 + 0.5 * uniform_double(rng);
    land.interactions.push_back({fa, second_a, fb, second_b, gaps[0].first + gaps[1].first + margin});
    --pairs;
  }

  for (int p = 0; p < pairs; ++p) {
    SyntheticLandscape::Interaction u;
    u.factor_a = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(space.factor_count())));
    do {
      u.factor_b = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(space.factor_count())));
    } while (u.factor_b == u.factor_a);
    if (u.factor_a > u.factor_b) std::swap(u.factor_a, u.factor_b);
    u.value_a = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(space.factor(u.factor_a).size())));
    u.value_b = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(space.factor(u.factor_b).size())));
    u.weight = 2.0 * uniform_double(rng) - 1.0;
    land.interactions.push_back(u);
  }
  return land;
}

inline nlohmann::json landscape_to_json(const SyntheticLandscape& land) {
  nlohmann::json interactions = nlohmann::json::array();
  for (const auto& u : land.interactions) {
    interactions.push_back({{"factor_a", u.factor_a},
                            {"value_a", u.value_a},
                            {"factor_b", u.factor_b},
                            {"value_b", u.value_b},
                            {"weight", u.weight}});
  }
  return {{"weights", land.weights}, {"interactions", interactions}, {"sigma", land.sigma}};
}

inline SyntheticLandscape landscape_from_json(const nlohmann::json& j) {
  SyntheticLandscape land;
  land.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  for (const auto& uj : j.value("interactions", nlohmann::json::array())) {
    land.interactions.push_back({uj.at("factor_a").get<int>(), uj.at("value_a").get<int>(),
                                 uj.at("factor_b").get<int>(), uj.at("value_b").get<int>(),
                                 uj.at("weight").get<double>()});
  }
  land.sigma = j.value("sigma", 0.0);
  return land;
}

}  // namespace hpss
