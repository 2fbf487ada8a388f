#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpss/backend.hpp"
#include "hpss/dataset.hpp"
#include "hpss/errors.hpp"
#include "hpss/judge_client.hpp"
#include "hpss/metrics.hpp"
#include "hpss/prompt.hpp"
#include "hpss/strategy.hpp"
#include "hpss/template_pack.hpp"

namespace hpss {

// Extracted score for one completion set under the configured decode mode.
// Greedy extracts from the single completion; self-consistency extracts from
// every completion and averages the successes. No successful extraction at
// all is a per-sample failure (nullopt).
struct JudgeCallResult {
  std::optional<double> score;
  int attempts = 0;
  int failures = 0;
};

inline JudgeCallResult judge_extract(const std::vector<std::string>& completions, JudgeMode mode,
                                     int scale_max) {
  JudgeCallResult result;
  double total = 0.0;
  int successes = 0;
  for (const std::string& text : completions) {
    ++result.attempts;
    try {
      total += mode == JudgeMode::kPointwise ? extract_rating(text, scale_max)
                                             : extract_preference(text);
      ++successes;
    } catch (const Error&) {
      ++result.failures;
    }
  }
  if (successes > 0) result.score = total / static_cast<double>(successes);
  return result;
}

// Strategy fitness via a live judge: render any auxiliary prompts the
// strategy needs, render the evaluation prompt per sample, call the judge,
// extract ratings, and score against the human labels with the dataset's
// metric. Per-sample judge calls may run concurrently up to the configured
// parallelism; aggregation is keyed by sample index.
class LiveBackend : public FitnessBackend {
 public:
  struct Options {
    std::uint64_t icl_seed = 0;
    // Strategies whose extraction-failure fraction exceeds this score 0.
    double max_failure_fraction = 0.2;
    std::filesystem::path trace_dir;  // empty = no traces
  };

  LiveBackend(const FactorSpace& space, Dataset dataset, TemplatePack pack, JudgeClient& client,
              Options options)
      : space_(&space),
        dataset_(std::move(dataset)),
        pack_(std::move(pack)),
        client_(&client),
        options_(std::move(options)) {
    dataset_.validate();
    if (!options_.trace_dir.empty()) std::filesystem::create_directories(options_.trace_dir);
  }

  std::string name() const override { return "live"; }

  int last_failure_count() const { return last_failures_; }
  bool last_evaluation_flagged() const { return last_flagged_; }

  double evaluate(const Strategy& strategy) override {
    space_->require_valid(strategy);
    StrategyView view = resolve_strategy(*space_, strategy);
    const JudgeMode mode = dataset_.mode;

    // AutoCoT depends only on (aspect, scale): one pre-call, shared across
    // samples and, through the content cache, across strategies.
    std::optional<std::string> autocot_text;
    if (view.autocot) {
      autocot_text =
          client_->complete_greedy(render_aux_prompt(AuxKind::kAutocot, dataset_, nullptr, pack_, view.scale_max));
    }

    const std::size_t n = dataset_.samples.size();
    std::vector<std::optional<double>> predicted(n);
    std::vector<std::string> errors(n);
    std::vector<std::string> prompt_keys(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          predicted[i] = judge_sample(strategy, view, dataset_.samples[i], autocot_text, errors[i],
                                      prompt_keys[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };

    int threads = std::max(1, std::min<int>(client_->config().parallelism, static_cast<int>(n)));
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(threads));
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<ScorePair> pairs;
    int failures = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!predicted[i]) {
        ++failures;
        continue;
      }
      ScorePair p;
      p.human = dataset_.samples[i].human;
      p.predicted = predicted[i];
      p.group = dataset_.samples[i].group;
      pairs.push_back(std::move(p));
    }
    last_failures_ = failures;

    double score = 0.0;
    bool flagged = false;
    if (static_cast<double>(failures) > options_.max_failure_fraction * static_cast<double>(n)) {
      flagged = true;  // unparseable strategy; conservative zero
    } else {
      try {
        if (mode == JudgeMode::kPairwise) {
          score = pairwise_accuracy(pairs);
        } else if (dataset_.grain == Grain::kSampleLevel) {
          score = spearman_sample(pairs);
        } else {
          score = spearman_dataset(pairs);
        }
      } catch (const UndefinedCorrelationError&) {
        flagged = true;  // constant predictions carry no signal
      }
    }
    last_flagged_ = flagged;
    if (flagged) score = 0.0;

    write_trace(strategy, predicted, errors, prompt_keys, score, flagged);
    return score;
  }

 private:
  std::optional<double> judge_sample(const Strategy& strategy, const StrategyView& view,
                                     const RatingSample& sample,
                                     const std::optional<std::string>& autocot_text,
                                     std::string& error_out, std::string& prompt_key_out) {
    AuxArtifacts aux;
    aux.autocot = autocot_text;
    if (view.reference == StrategyView::Reference::kSelfGenerated) {
      aux.reference =
          client_->complete_greedy(render_aux_prompt(AuxKind::kReference, dataset_, &sample, pack_, view.scale_max));
    }
    if (view.metrics) {
      aux.metrics =
          client_->complete_greedy(render_aux_prompt(AuxKind::kMetrics, dataset_, &sample, pack_, view.scale_max));
    }
    auto icl = select_icl_examples(dataset_, view.example_count, sample.id, options_.icl_seed);
    RenderedPrompt prompt =
        render_evaluation_prompt(*space_, strategy, dataset_, sample, pack_, aux, icl);
    prompt_key_out = client_->content_key(prompt.text);

    JudgeCallResult result = judge_extract(client_->complete(prompt.text), dataset_.mode, view.scale_max);
    if (!result.score) error_out = "extraction failed on all " + std::to_string(result.attempts) + " completions";
    return result.score;
  }

  void write_trace(const Strategy& strategy, const std::vector<std::optional<double>>& predicted,
                   const std::vector<std::string>& errors, const std::vector<std::string>& prompt_keys,
                   double score, bool flagged) {
    if (options_.trace_dir.empty()) return;
    nlohmann::json samples = nlohmann::json::array();
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      nlohmann::json entry{{"id", dataset_.samples[i].id}, {"human", dataset_.samples[i].human}};
      if (!prompt_keys[i].empty()) entry["prompt_key"] = prompt_keys[i];
      if (predicted[i]) entry["predicted"] = *predicted[i];
      if (!errors[i].empty()) entry["error"] = errors[i];
      samples.push_back(std::move(entry));
    }
    nlohmann::json j{{"strategy", strategy_to_json(*space_, strategy)},
                     {"score", score},
                     {"flagged", flagged},
                     {"samples", samples}};
    std::ofstream out(options_.trace_dir / (canonical_key(strategy) + ".json"));
    out << j.dump(2) << "\n";
  }

  const FactorSpace* space_;
  Dataset dataset_;
  TemplatePack pack_;
  JudgeClient* client_;
  Options options_;
  int last_failures_ = 0;
  bool last_flagged_ = false;
};

}  // namespace hpss
