#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hpss/dataset.hpp"
#include "hpss/errors.hpp"
#include "hpss/presets.hpp"
#include "hpss/rng.hpp"
#include "hpss/strategy.hpp"
#include "hpss/template_pack.hpp"

namespace hpss {

// Strategy decoded into rendering semantics. Factor ids are looked up by the
// well-known names in factor_id::; a space may omit factors (the pairwise
// preset has no scoring scale), in which case defaults apply.
struct StrategyView {
  enum class Criteria { kNone, kHuman, kSelfGenerated };
  enum class Reference { kNone, kSelfGenerated, kDialectic };
  enum class Cot { kNone, kPrefix, kSuffix };

  int scale_max = 0;  // 0 when the space has no scoring scale factor
  int example_count = 0;
  Criteria criteria = Criteria::kHuman;
  Reference reference = Reference::kNone;
  Cot cot = Cot::kPrefix;
  bool autocot = false;
  bool metrics = false;
  std::array<int, 3> order = {0, 1, 2};  // 0 = TD, 1 = ER, 2 = IC
};

namespace detail {

inline int parse_value_int(const std::string& factor, const std::string& value) {
  try {
    return std::stoi(value);
  } catch (const std::exception&) {
    throw StructuralError("factor '" + factor + "' value '" + value + "' is not numeric");
  }
}

inline std::array<int, 3> order_from_value(const std::string& value) {
  if (value == "td_er_ic") return {0, 1, 2};
  if (value == "td_ic_er") return {0, 2, 1};
  if (value == "er_td_ic") return {1, 0, 2};
  if (value == "er_ic_td") return {1, 2, 0};
  if (value == "ic_td_er") return {2, 0, 1};
  if (value == "ic_er_td") return {2, 1, 0};
  throw StructuralError("unknown order value '" + value + "'");
}

}  // namespace detail

inline StrategyView resolve_strategy(const FactorSpace& space, const Strategy& s) {
  space.require_valid(s);
  StrategyView view;
  for (int i = 0; i < space.factor_count(); ++i) {
    const Factor& f = space.factor(i);
    const std::string& value = f.values[static_cast<std::size_t>(s.assignment[static_cast<std::size_t>(i)])];
    if (f.id == factor_id::scoring_scale) {
      view.scale_max = detail::parse_value_int(f.id, value);
    } else if (f.id == factor_id::in_context_examples) {
      view.example_count = detail::parse_value_int(f.id, value);
    } else if (f.id == factor_id::criteria) {
      if (value == "none") view.criteria = StrategyView::Criteria::kNone;
      else if (value == "human") view.criteria = StrategyView::Criteria::kHuman;
      else if (value == "self_generated") view.criteria = StrategyView::Criteria::kSelfGenerated;
      else throw StructuralError("unknown criteria value '" + value + "'");
    } else if (f.id == factor_id::reference) {
      if (value == "none") view.reference = StrategyView::Reference::kNone;
      else if (value == "self_generated") view.reference = StrategyView::Reference::kSelfGenerated;
      else if (value == "dialectic") view.reference = StrategyView::Reference::kDialectic;
      else throw StructuralError("unknown reference value '" + value + "'");
    } else if (f.id == factor_id::cot) {
      if (value == "none") view.cot = StrategyView::Cot::kNone;
      else if (value == "prefix") view.cot = StrategyView::Cot::kPrefix;
      else if (value == "suffix") view.cot = StrategyView::Cot::kSuffix;
      else throw StructuralError("unknown cot value '" + value + "'");
    } else if (f.id == factor_id::autocot) {
      view.autocot = value == "autocot";
    } else if (f.id == factor_id::metrics) {
      view.metrics = value == "metrics";
    } else if (f.id == factor_id::order) {
      view.order = detail::order_from_value(value);
    } else {
      throw StructuralError("factor '" + f.id + "' has no rendering semantics");
    }
  }
  return view;
}

// Auxiliary artifacts a strategy may consume, generated by separate judge
// calls ahead of the evaluation call.
struct AuxArtifacts {
  std::optional<std::string> reference;
  std::optional<std::string> autocot;
  std::optional<std::string> metrics;
};

struct RenderedPrompt {
  std::string text;
  std::set<std::string> required_aux;
  std::vector<std::string> icl_ids;
};

using Bindings = std::map<std::string, std::string>;

// Single-pass "{name}" substitution. Substituted values are emitted verbatim,
// never rescanned, so sample text cannot inject placeholders. A name without
// a binding is an unresolved placeholder and fails the render.
inline std::string render_template(const std::string& tpl, const Bindings& bindings) {
  std::string out;
  out.reserve(tpl.size());
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    std::size_t open = tpl.find('{', pos);
    if (open == std::string::npos) {
      out.append(tpl, pos, std::string::npos);
      break;
    }
    out.append(tpl, pos, open - pos);
    std::size_t close = tpl.find('}', open + 1);
    if (close == std::string::npos)
      throw StructuralError("unterminated placeholder in template near '" + tpl.substr(open, 20) + "'");
    std::string name = tpl.substr(open + 1, close - open - 1);
    auto it = bindings.find(name);
    if (it == bindings.end()) throw StructuralError("unresolved placeholder '{" + name + "}'");
    out += it->second;
    pos = close + 1;
  }
  return out;
}

// Renders a component: blocks that resolve to nothing vanish, the rest join
// with blank lines.
inline std::string render_component(const std::vector<std::string>& blocks, const Bindings& bindings) {
  std::string out;
  for (const std::string& block : blocks) {
    std::string text = render_template(block, bindings);
    if (text.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += text;
  }
  return out;
}

// Human ratings shown inside in-context examples are mapped onto the
// strategy's active scale by linear rescaling, rounded to nearest integer.
inline int rescale_rating(double human, int native_max, int active_max) {
  if (native_max < 2) throw StructuralError("native scale must be >= 2 to rescale");
  double scaled = 1.0 + (human - 1.0) * (static_cast<double>(active_max) - 1.0) /
                            (static_cast<double>(native_max) - 1.0);
  return static_cast<int>(std::llround(scaled));
}

// Stratified selection over human ratings: the pool (minus the excluded
// sample) is sorted by rating, split into `count` near-equal contiguous bins,
// and one example is drawn per bin. Deterministic given the seed; the
// excluded id never appears.
inline std::vector<RatingSample> select_icl_examples(const Dataset& dataset, int count,
                                                     const std::string& exclude_id, std::uint64_t seed) {
  if (count < 0) throw StructuralError("example count must be >= 0");
  if (count == 0) return {};

  std::vector<const RatingSample*> pool;
  for (const RatingSample& s : dataset.samples) {
    if (s.id != exclude_id) pool.push_back(&s);
  }
  if (static_cast<int>(pool.size()) < count)
    throw StructuralError("dataset '" + dataset.id + "' has " + std::to_string(pool.size()) +
                          " candidates for " + std::to_string(count) + " in-context examples");

  std::stable_sort(pool.begin(), pool.end(), [](const RatingSample* a, const RatingSample* b) {
    if (a->human != b->human) return a->human < b->human;
    return a->id < b->id;
  });

  Rng rng(splitmix64(seed ^ fnv1a64(dataset.id) ^ static_cast<std::uint64_t>(count)));
  std::vector<RatingSample> picked;
  std::size_t n = pool.size();
  std::size_t base = n / static_cast<std::size_t>(count);
  std::size_t extra = n % static_cast<std::size_t>(count);
  std::size_t begin = 0;
  for (int b = 0; b < count; ++b) {
    std::size_t size = base + (static_cast<std::size_t>(b) < extra ? 1 : 0);
    std::size_t offset = static_cast<std::size_t>(uniform_below(rng, size));
    picked.push_back(*pool[begin + offset]);
    begin += size;
  }
  return picked;
}

namespace detail {

inline std::string format_rating(double value) {
  double rounded = std::llround(value);
  if (rounded == value) return std::to_string(static_cast<long long>(rounded));
  std::string s = std::to_string(value);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

inline void bind_sample_fields(const TemplatePack& pack, const RatingSample& sample, Bindings& b) {
  auto need = [&](const std::string& field) {
    auto it = sample.fields.find(field);
    if (it == sample.fields.end())
      throw StructuralError("sample '" + sample.id + "' is missing field '" + field + "'");
    b[field] = it->second;
  };
  for (const std::string& f : pack.context_fields) need(f);
  need(pack.candidate_field);
}

}  // namespace detail

// Composes the full evaluation prompt for one strategy and one sample. The
// three components render independently and are emitted in the strategy's
// order; factor values of "None" contribute nothing. Byte-deterministic for
// fixed inputs.
inline RenderedPrompt render_evaluation_prompt(const FactorSpace& space, const Strategy& strategy,
                                               const Dataset& dataset, const RatingSample& sample,
                                               const TemplatePack& pack, const AuxArtifacts& aux,
                                               const std::vector<RatingSample>& icl) {
  StrategyView view = resolve_strategy(space, strategy);

  RenderedPrompt out;
  if (view.reference == StrategyView::Reference::kSelfGenerated) out.required_aux.insert("reference");
  if (view.autocot) out.required_aux.insert("autocot");
  if (view.metrics) out.required_aux.insert("metrics");

  if (out.required_aux.contains("reference") && !aux.reference)
    throw DependencyError("strategy requires a self-generated reference");
  if (out.required_aux.contains("autocot") && !aux.autocot)
    throw DependencyError("strategy requires generated evaluation steps");
  if (out.required_aux.contains("metrics") && !aux.metrics)
    throw DependencyError("strategy requires generated metrics questions");
  if (static_cast<int>(icl.size()) != view.example_count)
    throw StructuralError("strategy wants " + std::to_string(view.example_count) +
                          " in-context examples, got " + std::to_string(icl.size()));

  Bindings base;
  base["aspect"] = dataset.aspect;
  if (view.scale_max > 0) base["max"] = std::to_string(view.scale_max);
  detail::bind_sample_fields(pack, sample, base);

  // Inline slots carry a leading space when active so they sit flush after
  // the preceding sentence and vanish without residue otherwise.
  auto inline_slot = [](const std::string& text) { return text.empty() ? text : " " + text; };

  Bindings b = base;
  const std::string& cot_tpl = view.cot == StrategyView::Cot::kNone     ? pack.cot_none
                               : view.cot == StrategyView::Cot::kPrefix ? pack.cot_prefix
                                                                        : pack.cot_suffix;
  b["cot"] = inline_slot(render_template(cot_tpl, base));
  b["reference_intro"] =
      view.reference == StrategyView::Reference::kSelfGenerated ? inline_slot(pack.reference_intro) : "";
  b["reference_dialectic"] =
      view.reference == StrategyView::Reference::kDialectic ? inline_slot(pack.reference_dialectic) : "";

  switch (view.criteria) {
    case StrategyView::Criteria::kNone:
      b["criteria"] = "";
      break;
    case StrategyView::Criteria::kHuman:
      b["criteria"] = inline_slot(dataset.criteria);
      break;
    case StrategyView::Criteria::kSelfGenerated:
      b["criteria"] = inline_slot(pack.criteria_self);
      break;
  }

  if (view.autocot) {
    Bindings ab = base;
    ab["autocot"] = *aux.autocot;
    b["autocot"] = render_template(pack.autocot_fragment, ab);
  } else {
    b["autocot"] = "";
  }
  if (view.metrics) {
    Bindings mb = base;
    mb["metrics"] = *aux.metrics;
    b["metrics"] = render_template(pack.metrics_fragment, mb);
  } else {
    b["metrics"] = "";
  }
  if (view.reference == StrategyView::Reference::kSelfGenerated) {
    Bindings rb = base;
    rb["reference"] = *aux.reference;
    b["reference_block"] = render_template(pack.reference_block, rb);
  } else {
    b["reference_block"] = "";
  }

  if (view.example_count > 0) {
    std::string example_list;
    int number = 0;
    for (const RatingSample& ex : icl) {
      Bindings eb;
      eb["number"] = std::to_string(++number);
      detail::bind_sample_fields(pack, ex, eb);
      eb["rating"] = view.scale_max > 0
                         ? std::to_string(rescale_rating(ex.human, dataset.native_scale, view.scale_max))
                         : detail::format_rating(ex.human);
      if (!example_list.empty()) example_list += "\n\n";
      example_list += render_template(pack.example_fragment, eb);
      out.icl_ids.push_back(ex.id);
    }
    Bindings wb = base;
    wb["example_list"] = example_list;
    b["examples"] = render_template(pack.examples_wrapper, wb);
  } else {
    b["examples"] = "";
  }

  std::array<std::string, 3> components = {render_component(pack.td_blocks, b),
                                           render_component(pack.er_blocks, b),
                                           render_component(pack.ic_blocks, b)};
  for (int slot : view.order) {
    const std::string& c = components[static_cast<std::size_t>(slot)];
    if (c.empty()) continue;
    if (!out.text.empty()) out.text += "\n\n";
    out.text += c;
  }
  return out;
}

enum class AuxKind { kReference, kAutocot, kMetrics };

inline AuxKind aux_kind_from_string(const std::string& s) {
  if (s == "reference") return AuxKind::kReference;
  if (s == "autocot") return AuxKind::kAutocot;
  if (s == "metrics") return AuxKind::kMetrics;
  throw StructuralError("unknown aux kind '" + s + "'");
}

// The generation prompt sent to the judge before the evaluation call.
// Reference and metrics prompts are sample-specific; the autocot prompt
// depends only on (aspect, scale) and is shared across samples.
inline std::string render_aux_prompt(AuxKind kind, const Dataset& dataset, const RatingSample* sample,
                                     const TemplatePack& pack, int scale_max) {
  Bindings b;
  b["aspect"] = dataset.aspect;
  b["criteria"] = dataset.criteria.empty() ? "" : " " + dataset.criteria;
  if (scale_max > 0) b["max"] = std::to_string(scale_max);
  if (sample) {
    for (const auto& [key, value] : sample->fields) b[key] = value;
  }

  const std::string* tpl = nullptr;
  switch (kind) {
    case AuxKind::kReference: tpl = &pack.aux_reference; break;
    case AuxKind::kAutocot: tpl = &pack.aux_autocot; break;
    case AuxKind::kMetrics: tpl = &pack.aux_metrics; break;
  }
  if (tpl->empty()) throw StructuralError("template pack has no aux prompt of this kind");
  return render_template(*tpl, b);
}

}  // namespace hpss
