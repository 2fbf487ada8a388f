#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hpss/errors.hpp"
#include "hpss/rng.hpp"

namespace hpss {

enum class DecodeMode { kGreedy, kSelfConsistency };

// Judge endpoint configuration. Base URL and key come from the environment
// (HPSS_API_BASE, HPSS_API_KEY); the rest from run config.
struct EndpointConfig {
  std::string base_url;
  std::string api_key;
  std::string model = "gpt-4o-mini";
  DecodeMode decode = DecodeMode::kGreedy;
  int self_consistency_n = 20;
  double sc_temperature = 1.0;
  int max_retries = 3;
  int backoff_ms = 250;
  int timeout_s = 120;
  int parallelism = 1;

  static EndpointConfig from_env() {
    EndpointConfig c;
    if (const char* base = std::getenv("HPSS_API_BASE")) c.base_url = base;
    if (const char* key = std::getenv("HPSS_API_KEY")) c.api_key = key;
    return c;
  }

  std::string decode_tag() const {
    return decode == DecodeMode::kGreedy ? "greedy"
                                         : "sc:" + std::to_string(self_consistency_n);
  }
};

// One file per content hash; the stored prompt is verified on read so a hash
// collision degrades to a miss instead of a wrong answer.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::optional<std::vector<std::string>> lookup(const std::string& decode_tag,
                                                 const std::string& prompt) const {
    std::ifstream in(entry_path(decode_tag, prompt));
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
    if (j.value("decode", std::string{}) != decode_tag || j.value("prompt", std::string{}) != prompt)
      return std::nullopt;
    return j.at("responses").get<std::vector<std::string>>();
  }

  void store(const std::string& decode_tag, const std::string& prompt,
             const std::vector<std::string>& responses) const {
    nlohmann::json j{{"decode", decode_tag}, {"prompt", prompt}, {"responses", responses}};
    std::filesystem::path final_path = entry_path(decode_tag, prompt);
    std::filesystem::path tmp = final_path;
    tmp += "." + std::to_string(
                     std::hash<std::thread::id>{}(std::this_thread::get_id()) & 0xffffULL) +
           ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw BackendError("cannot write cache entry " + tmp.string());
      out << j.dump();
    }
    std::error_code ec;
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
  }

  static std::string key(const std::string& decode_tag, const std::string& prompt) {
    std::string payload = decode_tag;
    payload.push_back('\0');
    payload += prompt;
    char buf[34];
    std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload)),
                  static_cast<unsigned long long>(fnv1a64(payload, 0x9e3779b97f4a7c15ULL)));
    return buf;
  }

 private:
  std::filesystem::path entry_path(const std::string& decode_tag, const std::string& prompt) const {
    return dir_ / (key(decode_tag, prompt) + ".json");
  }

  std::filesystem::path dir_;
};

// OpenAI-compatible chat-completions client with capped exponential backoff
// and an optional content-addressed response cache. Cache hits issue no
// network requests at all.
class JudgeClient {
 public:
  explicit JudgeClient(EndpointConfig config, std::shared_ptr<ResponseCache> cache = nullptr)
      : config_(std::move(config)), cache_(std::move(cache)) {
    if (config_.base_url.empty())
      throw ConfigError("judge endpoint missing; set HPSS_API_BASE");
    parse_base_url();
  }

  const EndpointConfig& config() const { return config_; }
  std::int64_t requests_issued() const { return requests_.load(); }

  // Content-cache key of an evaluation prompt under the configured decode.
  std::string content_key(const std::string& prompt) const {
    return ResponseCache::key(config_.decode_tag(), prompt);
  }

  // All completions for one prompt under the configured decode mode.
  std::vector<std::string> complete(const std::string& prompt) {
    const std::string tag = config_.decode_tag();
    if (cache_) {
      if (auto hit = cache_->lookup(tag, prompt)) return *hit;
    }
    std::vector<std::string> responses = request_completions(prompt);
    if (cache_) cache_->store(tag, prompt, responses);
    return responses;
  }

  // Always a single greedy completion, used for auxiliary generation.
  std::string complete_greedy(const std::string& prompt) {
    if (cache_) {
      if (auto hit = cache_->lookup("greedy", prompt); hit && !hit->empty()) return hit->front();
    }
    std::vector<std::string> responses = request_completions(prompt, /*force_greedy=*/true);
    if (cache_) cache_->store("greedy", prompt, responses);
    return responses.front();
  }

 private:
  void parse_base_url() {
    std::string url = config_.base_url;
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("bad base url '" + url + "'");
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      host_ = url;
      path_prefix_.clear();
    } else {
      host_ = url.substr(0, path_start);
      path_prefix_ = url.substr(path_start);
      while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
  }

  std::vector<std::string> request_completions(const std::string& prompt, bool force_greedy = false) {
    nlohmann::json body{{"model", config_.model},
                        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
    if (force_greedy || config_.decode == DecodeMode::kGreedy) {
      body["temperature"] = 0.0;
      body["n"] = 1;
    } else {
      body["temperature"] = config_.sc_temperature;
      body["n"] = config_.self_consistency_n;
    }

    std::string error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) {
        int shift = std::min(attempt - 1, 6);
        std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms * (1 << shift)));
      }
      ++requests_;
      httplib::Client client(host_);
      client.set_read_timeout(config_.timeout_s, 0);
      client.set_write_timeout(config_.timeout_s, 0);
      httplib::Headers headers;
      if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
      auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(),
                             "application/json");
      if (!res) {
        error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        error = "http status " + std::to_string(res->status);
        continue;
      }
      try {
        nlohmann::json j = nlohmann::json::parse(res->body);
        std::vector<std::string> out;
        for (const auto& choice : j.at("choices")) {
          out.push_back(choice.at("message").at("content").get<std::string>());
        }
        if (out.empty()) {
          error = "no choices in response";
          continue;
        }
        return out;
      } catch (const nlohmann::json::exception& e) {
        error = std::string("malformed response: ") + e.what();
        continue;
      }
    }
    throw BackendError("judge endpoint failed after " + std::to_string(config_.max_retries + 1) +
                       " attempts: " + error);
  }

  EndpointConfig config_;
  std::shared_ptr<ResponseCache> cache_;
  std::string host_;
  std::string path_prefix_;
  std::atomic<std::int64_t> requests_{0};
};

}  // namespace hpss
