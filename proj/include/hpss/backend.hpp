#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "hpss/errors.hpp"
#include "hpss/landscape.hpp"
#include "hpss/strategy.hpp"

namespace hpss {

// Turns a strategy into its scalar fitness r(T). The search core never knows
// which backend it is talking to; that seam is what makes desk-scale
// verification of the search possible.
class FitnessBackend {
 public:
  virtual ~FitnessBackend() = default;
  virtual double evaluate(const Strategy& s) = 0;
  virtual std::string name() const = 0;
};

class SyntheticBackend : public FitnessBackend {
 public:
  SyntheticBackend(const FactorSpace& space, SyntheticLandscape landscape, std::uint64_t noise_seed)
      : space_(&space), landscape_(std::move(landscape)), noise_seed_(noise_seed) {
    landscape_.require_fits(space);
  }

  double evaluate(const Strategy& s) override {
    space_->require_valid(s);
    return synthetic_fitness(landscape_, s, noise_seed_);
  }

  std::string name() const override { return "synth"; }

  const SyntheticLandscape& landscape() const { return landscape_; }

 private:
  const FactorSpace* space_;
  SyntheticLandscape landscape_;
  std::uint64_t noise_seed_;
};

// Replays previously journaled scores; a request for anything unseen is a
// cache miss, never a judge call.
class ReplayBackend : public FitnessBackend {
 public:
  explicit ReplayBackend(std::unordered_map<std::string, double> scores)
      : scores_(std::move(scores)) {}

  double evaluate(const Strategy& s) override {
    auto it = scores_.find(canonical_key(s));
    if (it == scores_.end()) throw CacheMissError("strategy " + canonical_key(s) + " not in replay source");
    return it->second;
  }

  std::string name() const override { return "replay"; }

 private:
  std::unordered_map<std::string, double> scores_;
};

// Reconstruction helper: every evaluation beyond the journal suspends the run.
class SuspendingBackend : public FitnessBackend {
 public:
  double evaluate(const Strategy&) override { throw BackendError("no backend attached"); }
  std::string name() const override { return "none"; }
};

}  // namespace hpss
