// Command-line front end: search runs, brute-force oracle, synthetic
// benchmarks, single-strategy scoring, prompt previews, and reports.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hpss/backend.hpp"
#include "hpss/dataset.hpp"
#include "hpss/errors.hpp"
#include "hpss/journal.hpp"
#include "hpss/judge_client.hpp"
#include "hpss/landscape.hpp"
#include "hpss/live_backend.hpp"
#include "hpss/presets.hpp"
#include "hpss/prompt.hpp"
#include "hpss/report.hpp"
#include "hpss/search.hpp"
#include "hpss/strategy.hpp"
#include "hpss/template_pack.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIntegrity = 3;
constexpr int kExitBackend = 4;

struct SpaceOptions {
  std::string space = "pointwise_v1";
};

struct BackendOptions {
  std::string kind = "synth";
  // synth
  std::string landscape_file;
  std::string synth_kind = "separable";
  std::uint64_t synth_seed = 0;
  double sigma = 0.0;
  // replay
  std::string source_dir;
  // live
  std::string dataset_path;
  std::string pack_file;
  std::string model = "gpt-4o-mini";
  std::string decode = "greedy";
  int sc_n = 20;
  int parallelism = 1;
  bool trace = false;
};

struct SearchOptions {
  std::string algorithm = "hpss";
  int budget = 71;
  std::uint64_t seed = 0;
  int k = 5;
  int g = 2;
  double rho = 0.2;
  double tau = 5.0;
  double lambda = 4.0;
  std::string run_dir;
  bool resume = false;
};

void add_space_flags(CLI::App* cmd, SpaceOptions& opt) {
  cmd->add_option("--space", opt.space,
                  "Space preset id (pointwise_v1, pairwise_v1) or config file");
}

void add_backend_flags(CLI::App* cmd, BackendOptions& opt) {
  cmd->add_option("--backend", opt.kind, "Fitness backend: synth, replay, live")
      ->check(CLI::IsMember({"synth", "replay", "live"}));
  cmd->add_option("--landscape", opt.landscape_file, "Synthetic landscape JSON file");
  cmd->add_option("--synth-kind", opt.synth_kind, "Generated landscape kind")
      ->check(CLI::IsMember({"separable", "interacting"}));
  cmd->add_option("--synth-seed", opt.synth_seed, "Seed for the generated landscape");
  cmd->add_option("--sigma", opt.sigma, "Frozen noise level for the synthetic backend");
  cmd->add_option("--source", opt.source_dir, "Run directory to replay scores from");
  cmd->add_option("--dataset", opt.dataset_path, "Dataset descriptor JSON (live backend)");
  cmd->add_option("--pack", opt.pack_file,
                  "Template pack file (default: builtin for the task family)");
  cmd->add_option("--model", opt.model, "Judge model name");
  cmd->add_option("--decode", opt.decode, "Judge decoding: greedy or sc")
      ->check(CLI::IsMember({"greedy", "sc"}));
  cmd->add_option("--sc-n", opt.sc_n, "Generations for self-consistency decoding");
  cmd->add_option("--parallelism", opt.parallelism, "Concurrent judge calls per evaluation");
  cmd->add_flag("--trace", opt.trace, "Write per-sample traces into the run directory");
}

void add_search_flags(CLI::App* cmd, SearchOptions& opt) {
  cmd->add_option("--algo", opt.algorithm, "Search algorithm")
      ->check(CLI::IsMember({"hpss", "greedy", "stepwise", "random"}));
  cmd->add_option("--budget", opt.budget, "Maximum fitness evaluations");
  cmd->add_option("--seed", opt.seed, "Search seed");
  cmd->add_option("-k,--population", opt.k, "Population size");
  cmd->add_option("-g,--mutations", opt.g, "Mutations per population member per sweep");
  cmd->add_option("--rho", opt.rho, "Exploitation probability");
  cmd->add_option("--tau", opt.tau, "Softmax temperature for exploration");
  cmd->add_option("--lambda", opt.lambda, "Exploration bonus weight");
  cmd->add_option("--run-dir", opt.run_dir, "Directory for journal, cache, and reports");
  cmd->add_flag("--resume", opt.resume, "Continue a suspended or interrupted run");
}

hpss::FactorSpace load_space(const std::string& spec) {
  if (hpss::is_space_preset(spec)) return hpss::space_preset(spec);
  std::ifstream in(spec);
  if (!in) throw hpss::ConfigError("space '" + spec + "' is neither a preset nor a readable file");
  json j;
  in >> j;
  return hpss::space_from_json(j);
}

hpss::SearchConfig make_config(const SearchOptions& opt) {
  hpss::SearchConfig c;
  c.population_size = opt.k;
  c.mutations_per_member = opt.g;
  c.exploit_probability = opt.rho;
  c.softmax_temperature = opt.tau;
  c.exploration_weight = opt.lambda;
  c.budget = opt.budget;
  c.seed = opt.seed;
  c.validate();
  return c;
}

json backend_manifest_json(const BackendOptions& opt, const hpss::SyntheticLandscape* landscape) {
  json j{{"kind", opt.kind}};
  if (opt.kind == "synth" && landscape) j["landscape"] = hpss::landscape_to_json(*landscape);
  if (opt.kind == "replay") j["source"] = opt.source_dir;
  if (opt.kind == "live") {
    j["model"] = opt.model;
    j["decode"] = opt.decode;
    j["sc_n"] = opt.sc_n;
    j["parallelism"] = opt.parallelism;
    j["pack"] = opt.pack_file;
  }
  return j;
}

// Owns whichever backend the flags ask for, plus the bits live mode needs.
struct BackendBundle {
  std::unique_ptr<hpss::FitnessBackend> backend;
  std::shared_ptr<hpss::ResponseCache> cache;
  std::unique_ptr<hpss::JudgeClient> client;
  hpss::SyntheticLandscape landscape;  // synth only
};

BackendBundle make_backend(const BackendOptions& opt, hpss::FactorSpace& space,
                           std::uint64_t run_seed, const fs::path& run_dir) {
  BackendBundle bundle;
  if (opt.kind == "synth") {
    if (!opt.landscape_file.empty()) {
      std::ifstream in(opt.landscape_file);
      if (!in) throw hpss::ConfigError("cannot open landscape '" + opt.landscape_file + "'");
      json j;
      in >> j;
      bundle.landscape = hpss::landscape_from_json(j);
    } else if (opt.synth_kind == "separable") {
      bundle.landscape = hpss::make_separable_landscape(space, opt.synth_seed);
    } else {
      bundle.landscape = hpss::make_interacting_landscape(space, opt.synth_seed);
    }
    if (opt.sigma != 0.0) bundle.landscape.sigma = opt.sigma;
    bundle.backend =
        std::make_unique<hpss::SyntheticBackend>(space, bundle.landscape, opt.synth_seed);
    return bundle;
  }
  if (opt.kind == "replay") {
    if (opt.source_dir.empty()) throw hpss::ConfigError("replay backend needs --source <run dir>");
    hpss::RunPaths source{opt.source_dir};
    auto records = hpss::load_journal(source.journal(), space);
    if (records.empty()) throw hpss::ConfigError("no journaled scores in '" + opt.source_dir + "'");
    bundle.backend = std::make_unique<hpss::ReplayBackend>(hpss::replay_scores(records));
    return bundle;
  }

  // live
  if (opt.dataset_path.empty()) throw hpss::ConfigError("live backend needs --dataset");
  if (run_dir.empty())
    throw hpss::ConfigError("live backend needs --run-dir for its journal and cache");
  hpss::Dataset dataset = hpss::load_dataset(opt.dataset_path);
  if (dataset.baseline_scale && space.factor_index(hpss::factor_id::scoring_scale) >= 0) {
    space = space.with_baseline_value(hpss::factor_id::scoring_scale, *dataset.baseline_scale);
  }
  hpss::EndpointConfig endpoint = hpss::EndpointConfig::from_env();
  endpoint.model = opt.model;
  endpoint.decode =
      opt.decode == "sc" ? hpss::DecodeMode::kSelfConsistency : hpss::DecodeMode::kGreedy;
  endpoint.self_consistency_n = opt.sc_n;
  endpoint.parallelism = opt.parallelism;
  bundle.cache = std::make_shared<hpss::ResponseCache>(run_dir / "cache");
  bundle.client = std::make_unique<hpss::JudgeClient>(endpoint, bundle.cache);
  hpss::LiveBackend::Options live;
  live.icl_seed = run_seed;
  if (opt.trace) live.trace_dir = run_dir / "trace";
  hpss::TemplatePack pack =
      opt.pack_file.empty() ? hpss::builtin_pack(dataset.task_family) : hpss::load_pack(opt.pack_file);
  bundle.backend = std::make_unique<hpss::LiveBackend>(space, dataset, pack, *bundle.client, live);
  return bundle;
}

void write_report_files(const hpss::RunPaths& paths, const hpss::RunReport& report) {
  std::ofstream(paths.report()) << report.to_json().dump(2) << "\n";
  std::ofstream(paths.curve()) << report.curve;
  if (!report.best_strategy_json.is_null())
    std::ofstream(paths.best_strategy()) << report.best_strategy_json.dump(2) << "\n";
}

void print_outcome(const hpss::FactorSpace& space, const std::string& algorithm,
                   const hpss::SearchOutcome& outcome) {
  std::cout << "algorithm:     " << algorithm << "\n";
  std::cout << "status:        "
            << (outcome.status == hpss::SearchStatus::kComplete ? "complete" : "suspended") << "\n";
  std::cout << "evaluations:   " << outcome.evaluations << "\n";
  if (outcome.evaluations > 0) {
    std::cout << "best score:    " << outcome.best_score << "\n";
    std::cout << "best strategy: " << hpss::strategy_to_json(space, outcome.best).dump() << "\n";
  }
}

int cmd_search(const SpaceOptions& space_opt, const BackendOptions& backend_opt,
               const SearchOptions& search_opt) {
  hpss::FactorSpace space = load_space(space_opt.space);
  hpss::SearchConfig config = make_config(search_opt);
  fs::path run_dir = search_opt.run_dir;

  hpss::RunJournal journal;
  std::optional<hpss::RunPaths> paths;
  std::optional<hpss::RunManifest> manifest;

  BackendBundle bundle;
  std::string algorithm = search_opt.algorithm;

  if (!run_dir.empty()) {
    paths = hpss::RunPaths{run_dir};
    if (search_opt.resume) {
      manifest = hpss::load_manifest(*paths);
      space = hpss::space_from_json(manifest->space_json);
      config = manifest->config;
      algorithm = manifest->algorithm;
      BackendOptions resumed = backend_opt;
      resumed.kind = manifest->backend_kind;
      if (manifest->backend_kind == "live") {
        resumed.dataset_path = manifest->dataset_path;
        resumed.model = manifest->backend_json.value("model", resumed.model);
        resumed.decode = manifest->backend_json.value("decode", resumed.decode);
        resumed.sc_n = manifest->backend_json.value("sc_n", resumed.sc_n);
        resumed.parallelism = manifest->backend_json.value("parallelism", resumed.parallelism);
        resumed.pack_file = manifest->backend_json.value("pack", resumed.pack_file);
        bundle = make_backend(resumed, space, config.seed, run_dir);
      } else if (manifest->backend_kind == "replay") {
        resumed.source_dir = manifest->backend_json.value("source", resumed.source_dir);
        bundle = make_backend(resumed, space, config.seed, run_dir);
      } else {
        bundle.landscape = hpss::landscape_from_json(manifest->backend_json.at("landscape"));
        bundle.backend =
            std::make_unique<hpss::SyntheticBackend>(space, bundle.landscape, config.seed);
      }
      journal.set_space(&space);
      journal.adopt(hpss::load_journal(paths->journal(), space));
      journal.attach_file(paths->journal());
    } else {
      if (fs::exists(paths->journal()))
        throw hpss::ConfigError("run directory already has a journal; pass --resume to continue");
      bundle = make_backend(backend_opt, space, config.seed, run_dir);
      manifest = hpss::RunManifest{};
      manifest->run_id = run_dir.filename().string();
      manifest->space_json = hpss::space_to_json(space);
      manifest->algorithm = algorithm;
      manifest->backend_kind = backend_opt.kind;
      manifest->backend_json = backend_manifest_json(backend_opt, &bundle.landscape);
      manifest->dataset_path = backend_opt.dataset_path;
      manifest->config = config;
      manifest->status = hpss::RunStatus::kRunning;
      hpss::save_manifest(*paths, *manifest);
      journal.set_space(&space);
      journal.attach_file(paths->journal());
    }
  } else {
    if (search_opt.resume) throw hpss::ConfigError("--resume needs --run-dir");
    bundle = make_backend(backend_opt, space, config.seed, run_dir);
  }

  bool stamp = (manifest ? manifest->backend_kind : backend_opt.kind) == "live";
  hpss::SearchOutcome outcome =
      hpss::run_algorithm(algorithm, space, *bundle.backend, config, journal, stamp);

  if (paths && manifest) {
    manifest->status = outcome.status == hpss::SearchStatus::kComplete
                           ? hpss::RunStatus::kComplete
                           : hpss::RunStatus::kSuspended;
    manifest->evaluations = outcome.evaluations;
    hpss::save_manifest(*paths, *manifest);
    hpss::RunReport report = hpss::build_report(algorithm, space, config, journal.records());
    write_report_files(*paths, report);
  }

  print_outcome(space, algorithm, outcome);
  if (outcome.status != hpss::SearchStatus::kComplete) {
    std::cerr << "run suspended; resume with: hpss search --run-dir " << run_dir.string()
              << " --resume\n";
    return kExitBackend;
  }
  return kExitOk;
}

int cmd_brute_force(const SpaceOptions& space_opt, const BackendOptions& backend_opt,
                    std::uint64_t cap, const std::string& out_file) {
  hpss::FactorSpace space = load_space(space_opt.space);
  if (space.size() > cap) {
    std::cerr << "refusing brute force: space has " << space.size() << " strategies, cap is "
              << cap << " (raise --cap to proceed)\n";
    return kExitConfig;
  }
  BackendBundle bundle = make_backend(backend_opt, space, 0, fs::path{});

  struct Row {
    hpss::Strategy strategy;
    double score;
  };
  std::vector<Row> rows;
  rows.reserve(space.size());
  hpss::StrategyEnumerator it(space);
  hpss::Strategy s;
  while (it.next(s)) rows.push_back({s, bundle.backend->evaluate(s)});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.score > b.score; });

  if (!out_file.empty()) {
    std::ofstream out(out_file);
    if (!out) throw hpss::ConfigError("cannot write '" + out_file + "'");
    out.precision(17);
    out << "rank,score,strategy\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out << i + 1 << "," << rows[i].score << ","
          << hpss::strategy_to_json(space, rows[i].strategy).dump() << "\n";
    }
    std::cout << "wrote " << rows.size() << " rows to " << out_file << "\n";
  }
  std::cout << "argmax score:    " << rows.front().score << "\n";
  std::cout << "argmax strategy: " << hpss::strategy_to_json(space, rows.front().strategy).dump()
            << "\n";
  return kExitOk;
}

int cmd_bench_synth(const SpaceOptions& space_opt, const std::string& kind, int landscapes,
                    int budget, std::uint64_t seed0, double sigma, const std::string& out_file) {
  hpss::FactorSpace space = load_space(space_opt.space);
  const std::vector<std::string> algorithms = {"hpss", "greedy", "stepwise", "random"};

  std::ofstream out;
  if (!out_file.empty()) {
    out.open(out_file);
    if (!out) throw hpss::ConfigError("cannot write '" + out_file + "'");
    out.precision(17);
    out << "landscape_seed,algorithm,best_score,evaluations,optimum_found\n";
  }

  std::map<std::string, std::vector<double>> best_scores;
  std::map<std::string, int> optimum_hits;
  const bool score_optimum = space.size() <= (1ULL << 17);

  for (int i = 0; i < landscapes; ++i) {
    std::uint64_t seed = seed0 + static_cast<std::uint64_t>(i);
    hpss::SyntheticLandscape land = kind == "separable"
                                        ? hpss::make_separable_landscape(space, seed)
                                        : hpss::make_interacting_landscape(space, seed);
    land.sigma = sigma;

    double optimum = 0.0;
    if (score_optimum) {
      hpss::SyntheticBackend oracle(space, land, seed);
      hpss::StrategyEnumerator it(space);
      hpss::Strategy s;
      optimum = -std::numeric_limits<double>::infinity();
      while (it.next(s)) optimum = std::max(optimum, oracle.evaluate(s));
    }

    for (const std::string& algo : algorithms) {
      hpss::SyntheticBackend backend(space, land, seed);
      hpss::RunJournal journal;
      hpss::SearchConfig config;
      config.budget = budget;
      config.seed = seed;
      hpss::SearchOutcome outcome = hpss::run_algorithm(algo, space, backend, config, journal);
      best_scores[algo].push_back(outcome.best_score);
      bool found = score_optimum && std::abs(outcome.best_score - optimum) < 1e-9;
      if (found) ++optimum_hits[algo];
      if (out.is_open()) {
        out << seed << "," << algo << "," << outcome.best_score << "," << outcome.evaluations
            << "," << (score_optimum ? (found ? "1" : "0") : "") << "\n";
      }
    }
  }

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };

  std::cout << "landscapes: " << landscapes << "  kind: " << kind << "  budget: " << budget
            << "\n";
  std::cout.precision(6);
  for (const std::string& algo : algorithms) {
    std::cout << algo << ": median best " << median(best_scores[algo]);
    if (score_optimum) std::cout << ", optimum found " << optimum_hits[algo] << "/" << landscapes;
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_eval_strategy(const SpaceOptions& space_opt, const BackendOptions& backend_opt,
                      const std::string& strategy_file, const std::string& run_dir) {
  hpss::FactorSpace space = load_space(space_opt.space);
  BackendBundle bundle = make_backend(backend_opt, space, 0, run_dir);
  std::ifstream in(strategy_file);
  if (!in) throw hpss::ConfigError("cannot open strategy '" + strategy_file + "'");
  json j;
  in >> j;
  hpss::Strategy s = hpss::strategy_from_json(space, j);
  double score = bundle.backend->evaluate(s);
  std::cout << "strategy: " << hpss::strategy_to_json(space, s).dump() << "\n";
  std::cout << "score:    " << score << "\n";
  return kExitOk;
}

int cmd_render(const SpaceOptions& space_opt, const std::string& strategy_file,
               const std::string& dataset_path, const std::string& sample_id,
               const std::string& pack_file, const std::string& dump_family, std::uint64_t seed) {
  if (!dump_family.empty()) {
    std::cout << hpss::pack_to_json(hpss::builtin_pack(dump_family)).dump(2) << "\n";
    return kExitOk;
  }
  if (dataset_path.empty()) throw hpss::ConfigError("render needs --dataset");
  hpss::FactorSpace space = load_space(space_opt.space);
  hpss::Dataset dataset = hpss::load_dataset(dataset_path);
  hpss::TemplatePack pack =
      pack_file.empty() ? hpss::builtin_pack(dataset.task_family) : hpss::load_pack(pack_file);

  hpss::Strategy s = space.baseline();
  if (!strategy_file.empty()) {
    std::ifstream in(strategy_file);
    if (!in) throw hpss::ConfigError("cannot open strategy '" + strategy_file + "'");
    json j;
    in >> j;
    s = hpss::strategy_from_json(space, j);
  }
  const hpss::RatingSample& sample =
      sample_id.empty() ? dataset.samples.front() : dataset.sample_by_id(sample_id);

  // Preview mode: aux artifacts a live run would generate are stand-ins.
  hpss::StrategyView view = hpss::resolve_strategy(space, s);
  hpss::AuxArtifacts aux;
  if (view.reference == hpss::StrategyView::Reference::kSelfGenerated)
    aux.reference = "<self-generated reference>";
  if (view.autocot) aux.autocot = "<generated evaluation steps>";
  if (view.metrics) aux.metrics = "<generated questions>";
  auto icl = hpss::select_icl_examples(dataset, view.example_count, sample.id, seed);

  hpss::RenderedPrompt r =
      hpss::render_evaluation_prompt(space, s, dataset, sample, pack, aux, icl);
  std::cout << r.text << "\n";
  if (!r.required_aux.empty()) {
    std::cerr << "# aux artifacts required:";
    for (const auto& a : r.required_aux) std::cerr << " " << a;
    std::cerr << "\n";
  }
  return kExitOk;
}

int cmd_report(const std::string& run_dir) {
  hpss::RunPaths paths{run_dir};
  hpss::RunManifest manifest = hpss::load_manifest(paths);
  hpss::FactorSpace space = hpss::space_from_json(manifest.space_json);
  auto records = hpss::load_journal(paths.journal(), space);
  hpss::RunReport report = hpss::build_report(manifest.algorithm, space, manifest.config, records);
  write_report_files(paths, report);

  std::cout << "run:           " << manifest.run_id << "\n";
  std::cout << "algorithm:     " << report.algorithm << "\n";
  std::cout << "status:        "
            << (report.status == hpss::SearchStatus::kComplete ? "complete" : "suspended") << "\n";
  std::cout << "evaluations:   " << report.evaluations << "\n";
  if (report.evaluations > 0) {
    std::cout << "best score:    " << report.best_score << "\n";
    std::cout << "best strategy: " << report.best_strategy_json.dump() << "\n";
  }
  if (!report.advantage.is_null()) {
    std::cout << "advantages (zero-mean residual per factor):\n";
    for (const auto& factor : report.advantage.at("factors")) {
      std::cout << "  " << factor.at("factor").get<std::string>() << ": residual "
                << factor.at("zero_mean_residual").get<double>() << "\n";
      for (const auto& value : factor.at("values")) {
        std::cout << "    " << value.at("value").get<std::string>()
                  << "  A=" << value.at("advantage").get<double>()
                  << "  N=" << value.at("explored").get<std::int64_t>()
                  << "  M=" << value.at("appeared").get<std::int64_t>() << "\n";
      }
    }
  }
  std::cout << "report files:  " << paths.report().string() << ", " << paths.curve().string()
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heuristic prompting-strategy search engine"};
  app.require_subcommand(1);

  SpaceOptions space_opt;
  BackendOptions backend_opt;
  SearchOptions search_opt;

  auto* search = app.add_subcommand("search", "Run a strategy search");
  add_space_flags(search, space_opt);
  add_backend_flags(search, backend_opt);
  add_search_flags(search, search_opt);

  SpaceOptions bf_space;
  BackendOptions bf_backend;
  std::uint64_t bf_cap = 20000;
  std::string bf_out;
  auto* brute = app.add_subcommand("brute-force", "Evaluate every strategy (the oracle)");
  add_space_flags(brute, bf_space);
  add_backend_flags(brute, bf_backend);
  brute->add_option("--cap", bf_cap, "Refuse spaces larger than this");
  brute->add_option("--out", bf_out, "CSV file for the ranked table");

  SpaceOptions bench_space;
  std::string bench_kind = "separable";
  int bench_landscapes = 50;
  int bench_budget = 71;
  std::uint64_t bench_seed0 = 0;
  double bench_sigma = 0.0;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench-synth", "Compare algorithms over seeded landscapes");
  add_space_flags(bench, bench_space);
  bench->add_option("--kind", bench_kind, "Landscape kind")
      ->check(CLI::IsMember({"separable", "interacting"}));
  bench->add_option("--landscapes", bench_landscapes, "Number of seeded landscapes");
  bench->add_option("--budget", bench_budget, "Evaluation budget per run");
  bench->add_option("--seed0", bench_seed0, "First landscape seed");
  bench->add_option("--sigma", bench_sigma, "Frozen noise level");
  bench->add_option("--out", bench_out, "CSV file for per-run rows");

  SpaceOptions eval_space;
  BackendOptions eval_backend;
  std::string eval_strategy_file;
  std::string eval_run_dir;
  auto* eval = app.add_subcommand("eval-strategy", "Score one strategy file");
  add_space_flags(eval, eval_space);
  add_backend_flags(eval, eval_backend);
  eval->add_option("--strategy", eval_strategy_file, "Strategy JSON file")->required();
  eval->add_option("--run-dir", eval_run_dir, "Directory for live cache/traces");

  SpaceOptions render_space;
  std::string render_strategy, render_dataset, render_sample, render_pack, render_dump;
  std::uint64_t render_seed = 0;
  auto* render = app.add_subcommand("render", "Preview the rendered prompt for a strategy");
  add_space_flags(render, render_space);
  render->add_option("--strategy", render_strategy, "Strategy JSON file (default: space baseline)");
  render->add_option("--dataset", render_dataset, "Dataset descriptor JSON");
  render->add_option("--sample", render_sample, "Sample id (default: first)");
  render->add_option("--pack", render_pack, "Template pack file");
  render->add_option("--dump-pack", render_dump, "Print a builtin pack as JSON and exit")
      ->check(CLI::IsMember(hpss::builtin_pack_families()));
  render->add_option("--seed", render_seed, "Seed for in-context example selection");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Regenerate reports for a run directory");
  report->add_option("--run-dir", report_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (search->parsed()) return cmd_search(space_opt, backend_opt, search_opt);
    if (brute->parsed()) return cmd_brute_force(bf_space, bf_backend, bf_cap, bf_out);
    if (bench->parsed())
      return cmd_bench_synth(bench_space, bench_kind, bench_landscapes, bench_budget, bench_seed0,
                             bench_sigma, bench_out);
    if (eval->parsed())
      return cmd_eval_strategy(eval_space, eval_backend, eval_strategy_file, eval_run_dir);
    if (render->parsed())
      return cmd_render(render_space, render_strategy, render_dataset, render_sample, render_pack,
                        render_dump, render_seed);
    if (report->parsed()) return cmd_report(report_dir);
  } catch (const hpss::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hpss::IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const hpss::CacheMissError& e) {
    std::cerr << "replay miss: " << e.what() << "\n";
    return kExitBackend;
  } catch (const hpss::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const hpss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
