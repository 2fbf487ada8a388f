#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hpss/errors.hpp"

namespace hpss {

// One judged sample: human label, extracted judge score (absent when
// extraction failed), optional group key for sample-level aggregation.
struct ScorePair {
  double human = 0.0;
  std::optional<double> predicted;
  std::optional<std::string> group;
};

namespace detail {

// Average ranks (1-based); ties share the mean of their rank range.
inline std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelationError("constant vector");
  return sxy / std::sqrt(sxx * syy);
}

inline void split_pairs(std::span<const ScorePair> pairs, std::vector<double>& human,
                        std::vector<double>& predicted) {
  human.clear();
  predicted.clear();
  human.reserve(pairs.size());
  predicted.reserve(pairs.size());
  for (const ScorePair& p : pairs) {
    if (!p.predicted) throw StructuralError("score pair without a predicted value");
    human.push_back(p.human);
    predicted.push_back(*p.predicted);
  }
}

// Visits the trimmed interior of every "[[x]]" occurrence, left to right.
template <typename Fn>
void scan_double_brackets(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find("[[", pos);
    if (open == std::string_view::npos) return;
    std::size_t close = text.find("]]", open + 2);
    if (close == std::string_view::npos) return;
    std::string_view body = text.substr(open + 2, close - open - 2);
    while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
    while (!body.empty() && body.back() == ' ') body.remove_suffix(1);
    fn(body);
    pos = open + 2;
  }
}

inline std::optional<double> parse_number(std::string_view body) {
  if (body.empty()) return std::nullopt;
  std::size_t consumed = 0;
  try {
    double value = std::stod(std::string(body), &consumed);
    if (consumed != body.size()) return std::nullopt;
    return value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Spearman rank correlation over the whole list, computed as the
// product-moment correlation of average ranks. Exact under ties and equal to
// the 1 - 6*sum(d^2)/(n(n^2-1)) closed form when there are none.
inline double spearman_dataset(std::span<const ScorePair> pairs) {
  if (pairs.size() < 2) throw StructuralError("spearman needs at least 2 pairs");
  std::vector<double> human, predicted;
  detail::split_pairs(pairs, human, predicted);
  auto hr = detail::average_ranks(human);
  auto pr = detail::average_ranks(predicted);
  return detail::pearson(hr, pr);
}

struct SampleLevelStats {
  int groups_used = 0;
  int groups_skipped = 0;
};

// Per-group Spearman averaged over groups (unweighted). Groups whose
// correlation is undefined are skipped; if every group is skipped the result
// is 0 and the caller can see that through `stats`.
inline double spearman_sample(std::span<const ScorePair> pairs, SampleLevelStats* stats = nullptr) {
  if (pairs.empty()) throw StructuralError("spearman needs at least 2 pairs");
  std::map<std::string, std::vector<ScorePair>> groups;
  for (const ScorePair& p : pairs) {
    if (!p.group) throw StructuralError("sample-level correlation requires a group key on every pair");
    groups[*p.group].push_back(p);
  }
  double total = 0.0;
  int used = 0, skipped = 0;
  for (const auto& [key, members] : groups) {
    if (members.size() < 2) throw StructuralError("group '" + key + "' has fewer than 2 members");
    try {
      total += spearman_dataset(members);
      ++used;
    } catch (const UndefinedCorrelationError&) {
      ++skipped;
    }
  }
  if (stats) *stats = {used, skipped};
  return used == 0 ? 0.0 : total / static_cast<double>(used);
}

// Fraction of exact matches between human and predicted preference labels.
inline double pairwise_accuracy(std::span<const ScorePair> pairs) {
  if (pairs.empty()) throw StructuralError("accuracy needs at least 1 pair");
  std::size_t hits = 0;
  for (const ScorePair& p : pairs) {
    if (!p.predicted) throw StructuralError("score pair without a predicted value");
    if (p.human == *p.predicted) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

// The number inside the last "[[x]]" pattern of a judge response where x
// parses as a number. Out-of-scale values are a range error; both surface as
// a per-sample failure upstream.
inline double extract_rating(std::string_view text, int scale_max) {
  if (scale_max < 1) throw StructuralError("scale_max must be >= 1");
  std::optional<double> last;
  detail::scan_double_brackets(text, [&](std::string_view body) {
    if (auto value = detail::parse_number(body)) last = *value;
  });
  if (!last) throw ExtractionError("no [[rating]] pattern found");
  if (*last < 1.0 || *last > static_cast<double>(scale_max))
    throw RangeError("rating outside [1, " + std::to_string(scale_max) + "]");
  return *last;
}

// Pairwise mode: the bracket convention carries a letter. "[[A]]" -> 0 (first
// response wins), "[[B]]" -> 1.
inline double extract_preference(std::string_view text) {
  std::optional<double> last;
  detail::scan_double_brackets(text, [&](std::string_view body) {
    if (body == "A" || body == "a") last = 0.0;
    if (body == "B" || body == "b") last = 1.0;
  });
  if (!last) throw ExtractionError("no [[A]]/[[B]] pattern found");
  return *last;
}

}  // namespace hpss
