#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#ifdef _WIN32
#include <io.h>
#define HPSS_FSYNC _commit
#define HPSS_FILENO _fileno
#else
#include <unistd.h>
#define HPSS_FSYNC ::fsync
#define HPSS_FILENO fileno
#endif

#include "hpss/config.hpp"
#include "hpss/errors.hpp"
#include "hpss/strategy.hpp"

namespace hpss {

// One scored strategy. `kind` is the move that produced it; exploration
// records carry the modified factor id so reports can attribute moves.
struct JournalRecord {
  int step = 0;
  std::string kind;  // init | explore | exploit | greedy | stepwise | random
  Strategy strategy;
  std::optional<std::string> modified_factor;
  double score = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::string> timestamp;
};

inline nlohmann::json record_to_json(const FactorSpace& space, const JournalRecord& r) {
  nlohmann::json j{{"step", r.step},
                   {"kind", r.kind},
                   {"strategy", strategy_to_json(space, r.strategy)},
                   {"score", r.score},
                   {"seed", r.seed}};
  if (r.modified_factor) j["modified_factor"] = *r.modified_factor;
  if (r.timestamp) j["ts"] = *r.timestamp;
  return j;
}

inline JournalRecord record_from_json(const FactorSpace& space, const nlohmann::json& j) {
  JournalRecord r;
  r.step = j.at("step").get<int>();
  r.kind = j.at("kind").get<std::string>();
  r.strategy = strategy_from_json(space, j.at("strategy"));
  if (j.contains("modified_factor")) r.modified_factor = j.at("modified_factor").get<std::string>();
  r.score = j.at("score").get<double>();
  r.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("ts")) r.timestamp = j.at("ts").get<std::string>();
  return r;
}

// Append-only history of one run. Optionally file-backed, in which case every
// append is durable (flushed and fsynced) before the search proceeds.
class RunJournal {
 public:
  RunJournal() = default;

  // Opens (and creates) the journal file in append mode. Existing records are
  // expected to be loaded by the caller beforehand via load_journal.
  void attach_file(const std::filesystem::path& path) {
    path_ = path;
    file_ = std::fopen(path.string().c_str(), "ab");
    if (!file_) throw BackendError("cannot open journal '" + path.string() + "'");
  }

  ~RunJournal() {
    if (file_) std::fclose(file_);
  }

  RunJournal(const RunJournal&) = delete;
  RunJournal& operator=(const RunJournal&) = delete;
  RunJournal(RunJournal&& other) noexcept { *this = std::move(other); }
  RunJournal& operator=(RunJournal&& other) noexcept {
    if (this != &other) {
      if (file_) std::fclose(file_);
      records_ = std::move(other.records_);
      path_ = std::move(other.path_);
      space_ = other.space_;
      file_ = other.file_;
      other.file_ = nullptr;
    }
    return *this;
  }

  void set_space(const FactorSpace* space) { space_ = space; }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const JournalRecord& at(std::size_t i) const { return records_.at(i); }
  const std::vector<JournalRecord>& records() const { return records_; }

  // Preloads records without writing them (used when resuming).
  void adopt(std::vector<JournalRecord> records) { records_ = std::move(records); }

  void append_and_sync(const JournalRecord& record) {
    if (record.step != static_cast<int>(records_.size()))
      throw StructuralError("journal step " + std::to_string(record.step) + " != length " +
                            std::to_string(records_.size()));
    if (file_) {
      if (!space_) throw StructuralError("file-backed journal needs a space for encoding");
      std::string line = record_to_json(*space_, record).dump();
      line.push_back('\n');
      if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() ||
          std::fflush(file_) != 0 || HPSS_FSYNC(HPSS_FILENO(file_)) != 0) {
        throw BackendError("journal write failed at step " + std::to_string(record.step));
      }
    }
    records_.push_back(record);
  }

  double best_score() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : records_) best = std::max(best, r.score);
    return best;
  }

  const JournalRecord& best_record() const {
    if (records_.empty()) throw StructuralError("journal is empty");
    std::size_t best = 0;
    for (std::size_t i = 1; i < records_.size(); ++i) {
      if (records_[i].score > records_[best].score) best = i;
    }
    return records_[best];
  }

 private:
  std::vector<JournalRecord> records_;
  std::filesystem::path path_;
  const FactorSpace* space_ = nullptr;
  std::FILE* file_ = nullptr;
};

// Parses a journal file; a malformed line is an integrity error naming it.
inline std::vector<JournalRecord> load_journal(const std::filesystem::path& path, const FactorSpace& space) {
  std::vector<JournalRecord> records;
  std::ifstream in(path);
  if (!in) return records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    JournalRecord r;
    try {
      r = record_from_json(space, nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw IntegrityError(std::string("unparseable record: ") + e.what(), line_no);
    }
    if (r.step != static_cast<int>(records.size()))
      throw IntegrityError("step " + std::to_string(r.step) + " out of sequence", line_no);
    records.push_back(std::move(r));
  }
  return records;
}

// Canonical-key -> score map for the replay backend.
inline std::unordered_map<std::string, double> replay_scores(const std::vector<JournalRecord>& records) {
  std::unordered_map<std::string, double> scores;
  for (const auto& r : records) scores.emplace(canonical_key(r.strategy), r.score);
  return scores;
}

enum class RunStatus { kRunning, kSuspended, kComplete };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kRunning: return "running";
    case RunStatus::kSuspended: return "suspended";
    case RunStatus::kComplete: return "complete";
  }
  return "running";
}

inline RunStatus run_status_from_string(const std::string& s) {
  if (s == "running") return RunStatus::kRunning;
  if (s == "suspended") return RunStatus::kSuspended;
  if (s == "complete") return RunStatus::kComplete;
  throw ConfigError("unknown run status '" + s + "'");
}

// Everything needed to reproduce or resume a run. The full space and backend
// descriptors are embedded so a run directory is self-contained; the journal
// stays the single source of truth for search state.
struct RunManifest {
  std::string run_id;
  nlohmann::json space_json;
  std::string algorithm;  // hpss | greedy | stepwise | random
  std::string backend_kind;  // synth | replay | live
  nlohmann::json backend_json;
  std::string dataset_path;  // live runs only
  SearchConfig config;
  RunStatus status = RunStatus::kRunning;
  int evaluations = 0;

  nlohmann::json to_json() const {
    return {{"run_id", run_id},
            {"space", space_json},
            {"algorithm", algorithm},
            {"backend", {{"kind", backend_kind}, {"spec", backend_json}}},
            {"dataset_path", dataset_path},
            {"config", config_to_json(config)},
            {"status", to_string(status)},
            {"evaluations", evaluations}};
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.space_json = j.at("space");
    m.algorithm = j.at("algorithm").get<std::string>();
    m.backend_kind = j.at("backend").at("kind").get<std::string>();
    m.backend_json = j.at("backend").value("spec", nlohmann::json::object());
    m.dataset_path = j.value("dataset_path", std::string{});
    m.config = config_from_json(j.at("config"));
    m.status = run_status_from_string(j.at("status").get<std::string>());
    m.evaluations = j.value("evaluations", 0);
    return m;
  }
};

// Directory-per-run layout.
struct RunPaths {
  std::filesystem::path dir;

  std::filesystem::path manifest() const { return dir / "manifest.json"; }
  std::filesystem::path journal() const { return dir / "journal.jsonl"; }
  std::filesystem::path cache() const { return dir / "cache"; }
  std::filesystem::path report() const { return dir / "report.json"; }
  std::filesystem::path curve() const { return dir / "curve.csv"; }
  std::filesystem::path best_strategy() const { return dir / "best_strategy.json"; }
};

inline void save_manifest(const RunPaths& paths, const RunManifest& manifest) {
  std::filesystem::create_directories(paths.dir);
  std::ofstream out(paths.manifest());
  if (!out) throw BackendError("cannot write manifest in '" + paths.dir.string() + "'");
  out << manifest.to_json().dump(2) << "\n";
}

inline RunManifest load_manifest(const RunPaths& paths) {
  std::ifstream in(paths.manifest());
  if (!in) throw ConfigError("no manifest in '" + paths.dir.string() + "'");
  nlohmann::json j;
  in >> j;
  return RunManifest::from_json(j);
}

}  // namespace hpss
