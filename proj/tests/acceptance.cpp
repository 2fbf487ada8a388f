// Acceptance suite: every release criterion, one pass/fail line each.
// Exits nonzero if any criterion fails.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hpss/backend.hpp"
#include "hpss/dataset.hpp"
#include "hpss/journal.hpp"
#include "hpss/judge_client.hpp"
#include "hpss/landscape.hpp"
#include "hpss/live_backend.hpp"
#include "hpss/metrics.hpp"
#include "hpss/presets.hpp"
#include "hpss/prompt.hpp"
#include "hpss/rng.hpp"
#include "hpss/search.hpp"
#include "hpss/strategy.hpp"
#include "hpss/template_pack.hpp"

using namespace hpss;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int number, bool ok, const std::string& name, const std::string& detail = "") {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

double elapsed_s(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct JournalAudit {
  std::string context;
  int budget = 0;
  std::vector<JournalRecord> records;
  bool paper_space_hpss = false;
  bool stepwise = false;
};

std::vector<JournalAudit> audits;

void audit(const std::string& context, int budget, const RunJournal& journal,
           bool paper_space_hpss = false, bool stepwise = false) {
  audits.push_back({context, budget, journal.records(), paper_space_hpss, stepwise});
}

FactorSpace tiny_space() {
  return FactorSpace("tiny3",
                     {Factor{"a", "A", {"a0", "a1"}},
                      Factor{"b", "B", {"b0", "b1", "b2"}},
                      Factor{"c", "C", {"c0", "c1", "c2"}}},
                     Strategy{{0, 0, 0}});
}

Strategy brute_force_argmax(const FactorSpace& space, FitnessBackend& backend) {
  StrategyEnumerator it(space);
  Strategy s, best;
  double top = -std::numeric_limits<double>::infinity();
  while (it.next(s)) {
    double v = backend.evaluate(s);
    if (v > top) {
      top = v;
      best = s;
    }
  }
  return best;
}

// --- criterion 1: oracle equivalence on the tiny space ----------------------

void criterion_1() {
  auto start = Clock::now();
  FactorSpace space = tiny_space();
  int agreed = 0;
  const int runs = 50;
  for (int i = 0; i < runs; ++i) {
    std::uint64_t seed = 100 + static_cast<std::uint64_t>(i);
    SyntheticBackend backend(space, make_interacting_landscape(space, seed), seed);
    Strategy oracle = brute_force_argmax(space, backend);

    SearchConfig config;
    config.budget = 18;
    config.seed = seed;
    RunJournal journal;
    SearchOutcome out = hpss_search(space, backend, config, journal);
    if (out.best == oracle) ++agreed;
    audit("c1/hpss", config.budget, journal);

    // Companion runs for the accounting criterion.
    for (const std::string algo : {"greedy", "stepwise", "random"}) {
      RunJournal j;
      run_algorithm(algo, space, backend, config, j);
      audit("c1/" + algo, config.budget, j, false, algo == "stepwise");
    }
  }
  double secs = elapsed_s(start);
  report(1, agreed == runs && secs < 5.0, "hpss matches brute force on 18-strategy space",
         std::to_string(agreed) + "/" + std::to_string(runs) + " in " + std::to_string(secs) + "s");
}

// --- criterion 2: separable optimum at paper scale ---------------------------

void criterion_2() {
  auto start = Clock::now();
  FactorSpace space = space_preset("pointwise_v1");
  int found = 0;
  const int runs = 100;
  for (int i = 0; i < runs; ++i) {
    std::uint64_t seed = 1000 + static_cast<std::uint64_t>(i);
    SyntheticLandscape land = make_separable_landscape(space, seed);
    SyntheticBackend backend(space, land, seed);

    Strategy optimum;
    for (const auto& row : land.weights) {
      optimum.assignment.push_back(
          static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()));
    }

    SearchConfig config;
    config.budget = 71;
    config.seed = seed;
    RunJournal journal;
    SearchOutcome out = hpss_search(space, backend, config, journal);
    if (out.best == optimum) ++found;
    audit("c2/hpss", config.budget, journal, true);
  }
  double secs = elapsed_s(start);
  report(2, found >= 95 && secs < 30.0,
         "hpss finds the separable optimum at budget 71 in >= 95% of runs",
         std::to_string(found) + "/100 in " + std::to_string(secs) + "s");
}

// --- criterion 3: baseline ordering on trap landscapes -----------------------

void criterion_3() {
  FactorSpace space = space_preset("pointwise_v1");
  std::map<std::string, std::vector<double>> best;
  const int runs = 50;
  for (int i = 0; i < runs; ++i) {
    std::uint64_t seed = 5000 + static_cast<std::uint64_t>(i);
    SyntheticLandscape land = make_interacting_landscape(space, seed);
    for (const std::string algo : {"hpss", "greedy", "random", "stepwise"}) {
      SyntheticBackend backend(space, land, seed);
      SearchConfig config;
      config.budget = 71;
      config.seed = seed;
      RunJournal journal;
      SearchOutcome out = run_algorithm(algo, space, backend, config, journal);
      best[algo].push_back(out.best_score);
      audit("c3/" + algo, config.budget, journal, algo == "hpss", algo == "stepwise");
    }
  }
  double h = median(best["hpss"]);
  double g = median(best["greedy"]);
  double r = median(best["random"]);
  char detail[160];
  std::snprintf(detail, sizeof(detail), "medians hpss=%.4f greedy=%.4f random=%.4f", h, g, r);
  report(3, h >= g && h >= r, "hpss median beats greedy and random on interacting landscapes",
         detail);
}

// --- criterion 4: budget and dedup accounting --------------------------------

void criterion_4() {
  bool ok = true;
  std::string first_bad;
  for (const JournalAudit& a : audits) {
    if (static_cast<int>(a.records.size()) > a.budget) {
      ok = false;
      first_bad = a.context + ": journal longer than budget";
      break;
    }
    std::set<std::string> keys;
    for (const auto& rec : a.records) keys.insert(canonical_key(rec.strategy));
    if (keys.size() != a.records.size()) {
      ok = false;
      first_bad = a.context + ": duplicate strategy evaluated";
      break;
    }
    if (a.paper_space_hpss) {
      int init = 0;
      for (const auto& rec : a.records) init += rec.kind == "init" ? 1 : 0;
      if (init != 21) {
        ok = false;
        first_bad = a.context + ": initialization used " + std::to_string(init) + " evaluations";
        break;
      }
    }
  }
  // Stepwise cost is exactly 1 + sum(m_i - 1) when the budget allows.
  FactorSpace paper = space_preset("pointwise_v1");
  for (const JournalAudit& a : audits) {
    if (!a.stepwise) continue;
    std::size_t expect = a.context.starts_with("c1/")
                             ? static_cast<std::size_t>(1 + tiny_space().neighbor_count())
                             : static_cast<std::size_t>(1 + paper.neighbor_count());
    expect = std::min(expect, static_cast<std::size_t>(a.budget));
    if (a.records.size() != expect) {
      ok = false;
      first_bad = a.context + ": stepwise used " + std::to_string(a.records.size()) +
                  " evaluations, expected " + std::to_string(expect);
      break;
    }
  }
  report(4, ok, "budget, dedup, and fixed-cost accounting over all runs",
         ok ? std::to_string(audits.size()) + " journals audited" : first_bad);
}

// --- criterion 5: advantage-table invariants ---------------------------------

void criterion_5() {
  FactorSpace space("inv",
                    {Factor{"solo", "S", {"only"}},
                     Factor{"a", "A", {"0", "1", "2", "3", "4"}},
                     Factor{"b", "B", {"0", "1", "2"}},
                     Factor{"c", "C", {"0", "1"}}},
                    Strategy{{0, 0, 0, 0}});
  AdvantageTable table = AdvantageTable::zeros(space);
  Rng rng(99);
  bool ok = true;
  const int updates = 10000;
  for (int i = 0; i < updates && ok; ++i) {
    int factor = 1 + static_cast<int>(uniform_below(rng, 3));
    int m = space.factor(factor).size();
    update_advantage(table, factor, static_cast<int>(uniform_below(rng, m)),
                     static_cast<int>(uniform_below(rng, m)), 2.0 * uniform_double(rng) - 1.0,
                     2.0 * uniform_double(rng) - 1.0);
    for (const auto& row : table.advantage) {
      double sum = std::accumulate(row.begin(), row.end(), 0.0);
      if (std::abs(sum) > 1e-9) ok = false;
    }
    if (table.advantage[0][0] != 0.0) ok = false;
  }
  report(5, ok, "advantage rows stay zero-mean over 10,000 updates, singletons stay 0");
}

// --- criterion 6: metric correctness -----------------------------------------

void criterion_6() {
  bool ok = true;
  std::string detail;
  auto pairs = [](const std::vector<double>& h, const std::vector<double>& p) {
    std::vector<ScorePair> out;
    for (std::size_t i = 0; i < h.size(); ++i) out.push_back({h[i], p[i], std::nullopt});
    return out;
  };

  ok &= spearman_dataset(pairs({1, 2, 3, 4}, {2, 1, 4, 3})) == 0.6;
  ok &= spearman_dataset(pairs({1, 2, 3}, {1, 2, 3})) == 1.0;
  ok &= spearman_dataset(pairs({1, 2, 3}, {3, 2, 1})) == -1.0;
  if (!ok) detail = "hand-derived cases diverged";

  // Tie-free property cases against the closed form.
  Rng rng(4242);
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    std::size_t n = 3 + uniform_below(rng, 30);
    std::vector<double> h(n), p(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = p[i] = static_cast<double>(i + 1);
    shuffle_inplace(rng, h);
    shuffle_inplace(rng, p);

    auto rank_of = [](const std::vector<double>& v) {
      std::vector<double> ranks(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        double r = 1.0;
        for (double other : v) {
          if (other < v[i]) r += 1.0;
        }
        ranks[i] = r;
      }
      return ranks;
    };
    auto hr = rank_of(h);
    auto pr = rank_of(p);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (hr[i] - pr[i]) * (hr[i] - pr[i]);
    double nn = static_cast<double>(n);
    double closed = 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
    if (std::abs(spearman_dataset(pairs(h, p)) - closed) >= 1e-12) {
      ok = false;
      detail = "closed-form mismatch at trial " + std::to_string(trial);
    }
  }

  for (int trial = 0; trial < 1000 && ok; ++trial) {
    std::size_t n = 1 + uniform_below(rng, 40);
    std::vector<double> h(n), p(n);
    std::size_t matches = 0;
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = static_cast<double>(uniform_below(rng, 2));
      p[i] = static_cast<double>(uniform_below(rng, 2));
      if (h[i] == p[i]) ++matches;
    }
    if (pairwise_accuracy(pairs(h, p)) !=
        static_cast<double>(matches) / static_cast<double>(n)) {
      ok = false;
      detail = "accuracy mismatch at trial " + std::to_string(trial);
    }
  }
  report(6, ok, "spearman and accuracy match hand-derived values and closed forms", detail);
}

// --- criterion 7: rendering sweep and golden fixtures ------------------------

Dataset sweep_dataset(const TemplatePack& pack, const std::string& family) {
  Dataset d;
  d.id = "sweep_" + family;
  d.aspect = "Coherence";
  d.criteria = "A coherent output should be well-structured and well-organized.";
  d.task_family = family;
  d.native_scale = 5;
  std::map<std::string, std::string> fields;
  for (const std::string& f : pack.context_fields) fields[f] = "Context text for " + f + ".";
  fields[pack.candidate_field] = "Candidate text.";
  for (int i = 0; i < 11; ++i) {
    d.samples.push_back(
        {"x" + std::to_string(i), std::nullopt, fields, 1.0 + static_cast<double>(i % 5)});
  }
  return d;
}

void criterion_7() {
  auto start = Clock::now();
  FactorSpace space = space_preset("pointwise_v1");
  AuxArtifacts aux;
  aux.reference = "Reference artifact.";
  aux.autocot = "1. Read.\n2. Rate.";
  aux.metrics = "1. Is it good?";

  bool ok = true;
  std::string detail;
  long renders = 0;
  for (const std::string& family : builtin_pack_families()) {
    TemplatePack pack = builtin_pack(family);
    Dataset d = sweep_dataset(pack, family);
    // One seeded ICL selection per example count covers every strategy.
    std::map<int, std::vector<RatingSample>> icl_by_count;
    for (int count : {0, 3, 5, 10})
      icl_by_count[count] = select_icl_examples(d, count, d.samples[0].id, 7);

    StrategyEnumerator it(space);
    Strategy s;
    while (it.next(s)) {
      StrategyView view = resolve_strategy(space, s);
      try {
        RenderedPrompt r = render_evaluation_prompt(space, s, d, d.samples[0], pack, aux,
                                                    icl_by_count.at(view.example_count));
        if (r.text.empty()) throw StructuralError("empty render");
        ++renders;
      } catch (const Error& e) {
        ok = false;
        detail = family + "/" + canonical_key(s) + ": " + e.what();
        break;
      }
    }
    if (!ok) break;
  }

  // Golden fixtures: byte equality against hand-built files.
  Dataset d;
  d.id = "toy_summ";
  d.aspect = "Coherence";
  d.criteria = "A coherent summary should be well-structured and well-organized.";
  d.task_family = "summarization";
  d.native_scale = 5;
  d.samples.push_back({"s1", std::nullopt,
                       {{"article", "The quick brown fox jumps over the lazy dog."},
                        {"summary", "A fox jumps over a dog."}},
                       4.0});
  TemplatePack pack = builtin_pack("summarization");
  AuxArtifacts golden_aux;
  golden_aux.reference = "The fox jumped over the dog in the park.";
  golden_aux.autocot = "1. Read the summary.\n2. Rate it.";
  golden_aux.metrics = "1. Does the summary cover the main event?";
  std::vector<RatingSample> icl = {
      {"e1", std::nullopt, {{"article", "First example article."}, {"summary", "First example summary."}}, 1.0},
      {"e2", std::nullopt, {{"article", "Second example article."}, {"summary", "Second example summary."}}, 3.0},
      {"e3", std::nullopt, {{"article", "Third example article."}, {"summary", "Third example summary."}}, 5.0},
  };

  struct Fixture {
    const char* file;
    std::map<std::string, std::string> values;
    bool aux;
    bool examples;
  };
  const std::vector<Fixture> fixtures = {
      {"f01_td_er_ic_cot_none.txt", {{"scoring_scale", "10"}, {"cot", "none"}, {"order", "td_er_ic"}}, false, false},
      {"f02_td_ic_er_cot_prefix.txt", {{"scoring_scale", "10"}, {"order", "td_ic_er"}}, false, false},
      {"f03_er_td_ic_cot_suffix.txt", {{"scoring_scale", "10"}, {"cot", "suffix"}, {"order", "er_td_ic"}}, false, false},
      {"f04_er_ic_td_cot_none.txt", {{"scoring_scale", "10"}, {"cot", "none"}, {"order", "er_ic_td"}}, false, false},
      {"f05_ic_td_er_cot_prefix.txt", {{"scoring_scale", "10"}, {"order", "ic_td_er"}}, false, false},
      {"f06_ic_er_td_cot_suffix.txt", {{"scoring_scale", "10"}, {"cot", "suffix"}, {"order", "ic_er_td"}}, false, false},
      {"f07_reference_self.txt", {{"scoring_scale", "10"}, {"reference", "self_generated"}}, true, false},
      {"f08_reference_dialectic.txt", {{"scoring_scale", "10"}, {"reference", "dialectic"}}, false, false},
      {"f09_autocot.txt", {{"scoring_scale", "10"}, {"cot", "none"}, {"autocot", "autocot"}}, true, false},
      {"f10_metrics.txt", {{"scoring_scale", "10"}, {"cot", "none"}, {"metrics", "metrics"}}, true, false},
      {"f11_icl_no_criteria.txt", {{"scoring_scale", "10"}, {"criteria", "none"}, {"in_context_examples", "3"}}, false, true},
      {"f12_criteria_self_scale100.txt", {{"scoring_scale", "100"}, {"criteria", "self_generated"}}, false, false},
  };

  int golden_ok = 0;
  for (const Fixture& f : fixtures) {
    nlohmann::json j = space_to_json(space).at("baseline");
    for (const auto& [key, value] : f.values) j[key] = value;
    Strategy s = strategy_from_json(space, j);
    RenderedPrompt r = render_evaluation_prompt(space, s, d, d.samples[0], pack,
                                                f.aux ? golden_aux : AuxArtifacts{},
                                                f.examples ? icl : std::vector<RatingSample>{});
    fs::path path = fs::path(HPSS_TEST_DIR) / "golden" / f.file;
    std::ifstream in(path, std::ios::binary);
    std::string expect(std::istreambuf_iterator<char>(in), {});
    if (!expect.empty() && expect.back() == '\n') expect.pop_back();
    if (r.text == expect) {
      ++golden_ok;
    } else if (ok) {
      ok = false;
      detail = std::string("golden fixture diverged: ") + f.file;
    }
  }

  double secs = elapsed_s(start);
  report(7, ok && golden_ok == 12, "all 12,960 strategies render for 4 task families, 12 golden fixtures match",
         ok ? std::to_string(renders) + " renders, " + std::to_string(golden_ok) + "/12 fixtures in " +
                  std::to_string(secs) + "s"
            : detail);
}

// --- criterion 8: determinism and resume -------------------------------------

void criterion_8() {
  FactorSpace space = space_preset("pointwise_v1");
  fs::path root = fs::temp_directory_path() / ("hpss_acc8_" + std::to_string(::getpid()));
  fs::create_directories(root);

  auto read_bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };

  bool ok = true;
  std::string detail;
  int trials_done = 0;
  Rng rng(31337);
  const std::vector<std::string> algorithms = {"hpss", "greedy", "stepwise", "random"};
  for (const std::string& algo : algorithms) {
    for (int trial = 0; trial < 5 && ok; ++trial) {
      std::uint64_t seed = 9000 + static_cast<std::uint64_t>(trial);
      SearchConfig config;
      config.budget = 60;
      config.seed = seed;

      fs::path full_path = root / (algo + std::to_string(trial) + "_full.jsonl");
      {
        SyntheticBackend backend(space, make_interacting_landscape(space, seed), seed);
        RunJournal journal;
        journal.set_space(&space);
        journal.attach_file(full_path);
        run_algorithm(algo, space, backend, config, journal);
      }

      auto full_records = load_journal(full_path, space);
      if (full_records.size() < 2) {
        ok = false;
        detail = algo + ": run too short to truncate";
        break;
      }
      std::size_t cut = 1 + uniform_below(rng, full_records.size() - 1);

      fs::path cut_path = root / (algo + std::to_string(trial) + "_cut.jsonl");
      {
        auto prefix = full_records;
        prefix.resize(cut);
        RunJournal writer;
        writer.set_space(&space);
        writer.attach_file(cut_path);
        for (const auto& r : prefix) writer.append_and_sync(r);
      }
      {
        SyntheticBackend backend(space, make_interacting_landscape(space, seed), seed);
        RunJournal journal;
        journal.set_space(&space);
        journal.adopt(load_journal(cut_path, space));
        journal.attach_file(cut_path);
        run_algorithm(algo, space, backend, config, journal);
      }
      if (read_bytes(full_path) != read_bytes(cut_path)) {
        ok = false;
        detail = algo + " trial " + std::to_string(trial) + ": resumed journal diverged at cut " +
                 std::to_string(cut);
        break;
      }
      ++trials_done;
    }
    if (!ok) break;
  }
  fs::remove_all(root);
  report(8, ok && trials_done == 20, "suspend/resume reproduces byte-identical journals",
         ok ? std::to_string(trials_done) + "/20 trials" : detail);
}

// --- criterion 9: live-mode smoke against a stubbed endpoint ------------------

void criterion_9() {
  httplib::Server server;
  std::atomic<int> requests{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++requests;
    nlohmann::json body = nlohmann::json::parse(req.body);
    std::string prompt = body.at("messages").at(0).at("content").get<std::string>();
    const std::pair<const char*, const char*> table[] = {
        {"MARK1", "Rating: [[2]]"}, {"MARK2", "Rating: [[1]]"},
        {"MARK3", "Rating: [[4]]"}, {"MARK4", "Rating: [[3]]"}};
    std::string rating = "Rating: [[1]]";
    for (const auto& [mark, r] : table) {
      if (prompt.find(mark) != std::string::npos) rating = r;
    }
    nlohmann::json choices = nlohmann::json::array();
    choices.push_back({{"message", {{"role", "assistant"}, {"content", rating}}}});
    res.set_content(nlohmann::json{{"choices", choices}}.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  bool ok = true;
  std::string detail;
  fs::path cache_dir = fs::temp_directory_path() / ("hpss_acc9_" + std::to_string(::getpid()));
  try {
    EndpointConfig config;
    config.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    config.backoff_ms = 1;
    JudgeClient client(config, std::make_shared<ResponseCache>(cache_dir));

    FactorSpace space = space_preset("pointwise_v1");
    Dataset d;
    d.id = "smoke";
    d.aspect = "Coherence";
    d.criteria = "Be coherent.";
    d.task_family = "summarization";
    d.native_scale = 5;
    for (int i = 1; i <= 4; ++i) {
      d.samples.push_back({"s" + std::to_string(i), std::nullopt,
                           {{"article", "Article " + std::to_string(i) + "."},
                            {"summary", "MARK" + std::to_string(i) + " text."}},
                           static_cast<double>(i)});
    }
    LiveBackend backend(space, d, builtin_pack("summarization"), client, {});

    double score = backend.evaluate(space.baseline());
    if (std::abs(score - 0.6) > 1e-12) {
      ok = false;
      detail = "expected spearman 0.6, got " + std::to_string(score);
    }
    if (ok && requests.load() != 4) {
      ok = false;
      detail = "expected 4 requests, saw " + std::to_string(requests.load());
    }
    if (ok) {
      double again = backend.evaluate(space.baseline());
      if (again != score || requests.load() != 4) {
        ok = false;
        detail = "cached re-evaluation issued requests";
      }
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  server.stop();
  listener.join();
  fs::remove_all(cache_dir);
  report(9, ok, "stubbed live endpoint: spearman 0.6, 4 requests, zero on cached repeat", detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", failures);
  return 1;
}
