#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hpss/dataset.hpp"
#include "hpss/presets.hpp"
#include "hpss/prompt.hpp"
#include "hpss/template_pack.hpp"

using namespace hpss;

namespace {

Dataset summeval_like() {
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
  for (int i = 0; i < 12; ++i) {
    double rating = 1.0 + static_cast<double>(i % 5);
    d.samples.push_back({"p" + std::to_string(i), std::nullopt,
                         {{"article", "Article body " + std::to_string(i) + "."},
                          {"summary", "Summary body " + std::to_string(i) + "."}},
                         rating});
  }
  return d;
}

Strategy make_strategy(const FactorSpace& space, const std::map<std::string, std::string>& values) {
  nlohmann::json j = space_to_json(space).at("baseline");
  for (const auto& [k, v] : values) j[k] = v;
  return strategy_from_json(space, j);
}

AuxArtifacts full_aux() {
  AuxArtifacts aux;
  aux.reference = "The fox jumped over the dog in the park.";
  aux.autocot = "1. Read the summary.\n2. Rate it.";
  aux.metrics = "1. Does the summary cover the main event?";
  return aux;
}

std::string read_golden(const std::string& name) {
  std::filesystem::path path = std::filesystem::path(HPSS_TEST_DIR) / "golden" / name;
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing golden file ", path.string());
  std::string text(std::istreambuf_iterator<char>(in), {});
  // Fixture files end with one editor-friendly trailing newline; rendered
  // prompts do not.
  REQUIRE(!text.empty());
  REQUIRE(text.back() == '\n');
  text.pop_back();
  return text;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find('\n', pos);
    if (next == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return lines;
}

}  // namespace

TEST_CASE("template engine resolves placeholders strictly") {
  CHECK(render_template("a {x} c", {{"x", "b"}}) == "a b c");
  CHECK(render_template("{x}{x}", {{"x", "y"}}) == "yy");
  CHECK(render_template("plain", {}) == "plain");
  CHECK_THROWS_AS(render_template("a {missing}", {}), StructuralError);
  CHECK_THROWS_AS(render_template("a {unterminated", {}), StructuralError);
  // Values are never rescanned.
  CHECK(render_template("{x}", {{"x", "{y}"}}) == "{y}");
}

TEST_CASE("rating rescale is linear with round-to-nearest") {
  CHECK(rescale_rating(1.0, 5, 10) == 1);
  CHECK(rescale_rating(5.0, 5, 10) == 10);
  CHECK(rescale_rating(3.0, 5, 10) == 6);  // 5.5 rounds away from zero
  CHECK(rescale_rating(3.67, 5, 100) == 67);
  CHECK(rescale_rating(2.0, 3, 3) == 2);
  CHECK_THROWS_AS(rescale_rating(1.0, 1, 10), StructuralError);
}

TEST_CASE("baseline render matches the published fragments") {
  FactorSpace space = space_preset("pointwise_v1");
  Dataset d = summeval_like();
  TemplatePack pack = builtin_pack("summarization");

  Strategy s = make_strategy(space, {{"cot", "none"}, {"scoring_scale", "10"}});
  RenderedPrompt r = render_evaluation_prompt(space, s, d, d.samples[0], pack, {}, {});
  CHECK(r.text.starts_with("## Instruction"));
  CHECK(r.text.find("directly output your rating") != std::string::npos);
  CHECK(r.text.find("Rating: [[10]]") != std::string::npos);
  CHECK(r.required_aux.empty());
  CHECK(r.icl_ids.empty());

  SUBCASE("all-none factors leave no residue") {
    Strategy bare = make_strategy(space, {{"criteria", "none"}});
    RenderedPrompt rb = render_evaluation_prompt(space, bare, d, d.samples[0], pack, {}, {});
    CHECK(rb.text.find("Reference") == std::string::npos);
    CHECK(rb.text.find("Evaluation Steps:") == std::string::npos);
    CHECK(rb.text.find("Questions about") == std::string::npos);
    CHECK(rb.text.find("Here are some examples") == std::string::npos);
    CHECK(rb.text.find("  ") == std::string::npos);  // no double spaces from empty slots
  }

  SUBCASE("rendering is byte-deterministic") {
    RenderedPrompt again = render_evaluation_prompt(space, s, d, d.samples[0], pack, {}, {});
    CHECK(again.text == r.text);
  }
}

TEST_CASE("order factor permutes components without touching their insides") {
  FactorSpace space = space_preset("pointwise_v1");
  Dataset d = summeval_like();
  TemplatePack pack = builtin_pack("summarization");
  AuxArtifacts aux = full_aux();

  Strategy base = make_strategy(space, {{"reference", "self_generated"},
                                        {"autocot", "autocot"},
                                        {"metrics", "metrics"}});
  RenderedPrompt first = render_evaluation_prompt(space, base, d, d.samples[0], pack, aux, {});

  auto sorted_lines = [](const std::string& text) {
    auto lines = lines_of(text);
    std::sort(lines.begin(), lines.end());
    return lines;
  };
  auto reference_lines = sorted_lines(first.text);

  const char* orders[] = {"td_er_ic", "td_ic_er", "er_td_ic", "er_ic_td", "ic_td_er", "ic_er_td"};
  std::set<std::string> renders;
  for (const char* order : orders) {
    Strategy s = make_strategy(space, {{"reference", "self_generated"},
                                       {"autocot", "autocot"},
                                       {"metrics", "metrics"},
                                       {"order", order}});
    RenderedPrompt r = render_evaluation_prompt(space, s, d, d.samples[0], pack, aux, {});
    CHECK(sorted_lines(r.text) == reference_lines);
    renders.insert(r.text);

    // Component heads appear in the order the value dictates.
    std::size_t td = r.text.find("## Instruction");
    std::size_t er = r.text.find("Here are some rules");
    std::size_t ic = r.text.find("## Article");
    REQUIRE(td != std::string::npos);
    REQUIRE(er != std::string::npos);
    REQUIRE(ic != std::string::npos);
    std::map<std::string, std::vector<std::size_t>> expected{
        {"td_er_ic", {td, er, ic}}, {"td_ic_er", {td, ic, er}}, {"er_td_ic", {er, td, ic}},
        {"er_ic_td", {er, ic, td}}, {"ic_td_er", {ic, td, er}}, {"ic_er_td", {ic, er, td}}};
    auto pos = expected.at(order);
    CHECK(std::is_sorted(pos.begin(), pos.end()));
  }
  CHECK(renders.size() == 6);  // all six orders produce distinct bytes
}

TEST_CASE("aux artifacts are demanded exactly when the strategy needs them") {
  FactorSpace space = space_preset("pointwise_v1");
  Dataset d = summeval_like();
  TemplatePack pack = builtin_pack("summarization");

  Strategy s = make_strategy(space, {{"reference", "self_generated"},
                                     {"autocot", "autocot"},
                                     {"metrics", "metrics"}});
  CHECK_THROWS_AS(render_evaluation_prompt(space, s, d, d.samples[0], pack, {}, {}), DependencyError);

  RenderedPrompt r = render_evaluation_prompt(space, s, d, d.samples[0], pack, full_aux(), {});
  CHECK(r.required_aux == std::set<std::string>{"reference", "autocot", "metrics"});
  CHECK(r.text.find("## The Start of Reference Summary") != std::string::npos);
  CHECK(r.text.find("Evaluation Steps:") != std::string::npos);
  CHECK(r.text.find("## Questions about Summary") != std::string::npos);

  SUBCASE("dialectic needs no pre-call") {
    Strategy dial = make_strategy(space, {{"reference", "dialectic"}});
    RenderedPrompt rd = render_evaluation_prompt(space, dial, d, d.samples[0], pack, {}, {});
    CHECK(rd.required_aux.empty());
    CHECK(rd.text.find("generate your own summary") != std::string::npos);
    CHECK(rd.text.find("## The Start of Reference Summary") == std::string::npos);
  }

  SUBCASE("icl count mismatch is structural") {
    Strategy icl3 = make_strategy(space, {{"in_context_examples", "3"}});
    CHECK_THROWS_AS(render_evaluation_prompt(space, icl3, d, d.samples[0], pack, {}, {}),
                    StructuralError);
  }
}

TEST_CASE("aux prompts carry the published instruction sentences") {
  Dataset d = summeval_like();
  TemplatePack pack = builtin_pack("summarization");
  CHECK(render_aux_prompt(AuxKind::kReference, d, &d.samples[0], pack, 10)
            .find("Please summarize the following text") != std::string::npos);
  CHECK(render_aux_prompt(AuxKind::kAutocot, d, nullptr, pack, 10)
            .find("generate the evaluation steps") != std::string::npos);
  CHECK(render_aux_prompt(AuxKind::kMetrics, d, &d.samples[0], pack, 10)
            .find("at most three concise questions") != std::string::npos);

  SUBCASE("aux prompt kinds must exist in the pack") {
    TemplatePack stripped = pack;
    stripped.aux_metrics.clear();
    CHECK_THROWS_AS(render_aux_prompt(AuxKind::kMetrics, d, &d.samples[0], stripped, 10),
                    StructuralError);
  }
}

TEST_CASE("icl selection is stratified, seeded, and leak-free") {
  Dataset d;
  d.id = "strata";
  d.aspect = "x";
  d.task_family = "summarization";
  d.native_scale = 3;
  const double ratings[] = {1, 1, 2, 2, 3, 3};
  for (int i = 0; i < 6; ++i) {
    d.samples.push_back({"e" + std::to_string(i), std::nullopt,
                         {{"article", "a"}, {"summary", "s"}}, ratings[i]});
  }

  SUBCASE("count zero selects nothing") { CHECK(select_icl_examples(d, 0, "none", 1).empty()); }

  SUBCASE("one example per rating stratum") {
    auto picked = select_icl_examples(d, 3, "absent", 7);
    REQUIRE(picked.size() == 3);
    CHECK(picked[0].human == 1.0);
    CHECK(picked[1].human == 2.0);
    CHECK(picked[2].human == 3.0);
  }

  SUBCASE("the excluded id never appears") {
    for (int trial = 0; trial < 6; ++trial) {
      std::string excluded = "e" + std::to_string(trial);
      auto picked = select_icl_examples(d, 3, excluded, static_cast<std::uint64_t>(trial));
      for (const auto& ex : picked) CHECK(ex.id != excluded);
    }
  }

  SUBCASE("selection is deterministic per seed") {
    auto a = select_icl_examples(d, 3, "absent", 11);
    auto b = select_icl_examples(d, 3, "absent", 11);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].id == b[i].id);
  }

  SUBCASE("insufficient pool is structural") {
    CHECK_THROWS_AS(select_icl_examples(d, 6, "e0", 1), StructuralError);
  }
}

TEST_CASE("golden fixtures: six orders, three cot variants, aux and icl mixes") {
  FactorSpace space = space_preset("pointwise_v1");
  Dataset d = summeval_like();
  TemplatePack pack = builtin_pack("summarization");

  std::vector<RatingSample> icl = {
      {"e1", std::nullopt, {{"article", "First example article."}, {"summary", "First example summary."}}, 1.0},
      {"e2", std::nullopt, {{"article", "Second example article."}, {"summary", "Second example summary."}}, 3.0},
      {"e3", std::nullopt, {{"article", "Third example article."}, {"summary", "Third example summary."}}, 5.0},
  };

  struct Fixture {
    const char* file;
    std::map<std::string, std::string> values;
    bool aux = false;
    bool examples = false;
  };
  const std::vector<Fixture> fixtures = {
      {"f01_td_er_ic_cot_none.txt", {{"scoring_scale", "10"}, {"cot", "none"}, {"order", "td_er_ic"}}},
      {"f02_td_ic_er_cot_prefix.txt", {{"scoring_scale", "10"}, {"order", "td_ic_er"}}},
      {"f03_er_td_ic_cot_suffix.txt", {{"scoring_scale", "10"}, {"cot", "suffix"}, {"order", "er_td_ic"}}},
      {"f04_er_ic_td_cot_none.txt", {{"scoring_scale", "10"}, {"cot", "none"}, {"order", "er_ic_td"}}},
      {"f05_ic_td_er_cot_prefix.txt", {{"scoring_scale", "10"}, {"order", "ic_td_er"}}},
      {"f06_ic_er_td_cot_suffix.txt", {{"scoring_scale", "10"}, {"cot", "suffix"}, {"order", "ic_er_td"}}},
      {"f07_reference_self.txt", {{"scoring_scale", "10"}, {"reference", "self_generated"}}, true},
      {"f08_reference_dialectic.txt", {{"scoring_scale", "10"}, {"reference", "dialectic"}}},
      {"f09_autocot.txt", {{"scoring_scale", "10"}, {"cot", "none"}, {"autocot", "autocot"}}, true},
      {"f10_metrics.txt", {{"scoring_scale", "10"}, {"cot", "none"}, {"metrics", "metrics"}}, true},
      {"f11_icl_no_criteria.txt",
       {{"scoring_scale", "10"}, {"criteria", "none"}, {"in_context_examples", "3"}},
       false,
       true},
      {"f12_criteria_self_scale100.txt", {{"scoring_scale", "100"}, {"criteria", "self_generated"}}},
  };

  for (const Fixture& f : fixtures) {
    CAPTURE(f.file);
    Strategy s = make_strategy(space, f.values);
    RenderedPrompt r = render_evaluation_prompt(space, s, d, d.samples[0], pack,
                                                f.aux ? full_aux() : AuxArtifacts{},
                                                f.examples ? icl : std::vector<RatingSample>{});
    std::string expect = read_golden(f.file);
    CHECK_MESSAGE(r.text == expect, "fixture ", f.file, " diverged;\n--- rendered ---\n", r.text,
                  "\n--- expected ---\n", expect);
  }
}

TEST_CASE("every strategy renders cleanly for every task family") {
  FactorSpace space = space_preset("pointwise_v1");
  AuxArtifacts aux = full_aux();

  for (const std::string& family : builtin_pack_families()) {
    TemplatePack pack = builtin_pack(family);
    Dataset d;
    d.id = "sweep_" + family;
    d.aspect = "Quality";
    d.criteria = "Good output is good.";
    d.task_family = family;
    d.native_scale = 5;
    std::map<std::string, std::string> fields;
    for (const std::string& f : pack.context_fields) fields[f] = "Context for " + f + ".";
    fields[pack.candidate_field] = "Candidate text.";
    for (int i = 0; i < 11; ++i) {
      d.samples.push_back({"x" + std::to_string(i), std::nullopt, fields,
                           1.0 + static_cast<double>(i % 5)});
    }

    // Sampled sweep here; the exhaustive 12,960 x 4 sweep runs in acceptance.
    StrategyEnumerator it(space);
    Strategy s;
    int count = 0;
    while (it.next(s)) {
      if (count++ % 13 != 0) continue;
      StrategyView view = resolve_strategy(space, s);
      auto icl = select_icl_examples(d, view.example_count, d.samples[0].id, 5);
      RenderedPrompt r = render_evaluation_prompt(space, s, d, d.samples[0], pack, aux, icl);
      CHECK(!r.text.empty());
    }
  }
}

TEST_CASE("pack json round-trips and loads from disk") {
  TemplatePack pack = builtin_pack("dialogue");
  TemplatePack copy = pack_from_json(pack_to_json(pack));
  CHECK(copy.task_family == pack.task_family);
  CHECK(copy.ic_blocks == pack.ic_blocks);
  CHECK(copy.aux_metrics == pack.aux_metrics);

  auto path = std::filesystem::temp_directory_path() / "hpss_pack_test.json";
  {
    std::ofstream out(path);
    out << pack_to_json(pack).dump(2);
  }
  TemplatePack loaded = load_pack(path);
  CHECK(loaded.cot_suffix == pack.cot_suffix);
  std::filesystem::remove(path);
}
