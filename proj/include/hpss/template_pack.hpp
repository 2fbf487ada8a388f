#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpss/errors.hpp"

namespace hpss {

// Everything needed to turn a strategy and a sample into prompt text for one
// task family. Components are lists of blocks; blocks that resolve to the
// empty string vanish, and the survivors join with blank lines. Inline slots
// ({cot}, {criteria}, ...) sit flush against the preceding sentence and are
// bound with a leading space when active.
//
// Four packs ship builtin: summarization, dialogue, data2text, story. Packs
// are plain data; a new task family is a new pack file, not new code.
struct TemplatePack {
  std::string task_family;
  std::vector<std::string> context_fields;
  std::string candidate_field;

  std::vector<std::string> td_blocks;
  std::vector<std::string> er_blocks;
  std::vector<std::string> ic_blocks;

  std::string reference_intro;
  std::string reference_block;
  std::string reference_dialectic;
  std::string cot_none;
  std::string cot_prefix;
  std::string cot_suffix;
  std::string autocot_fragment;
  std::string examples_wrapper;  // contains {example_list}
  std::string example_fragment;  // one in-context example
  std::string metrics_fragment;
  std::string criteria_self;

  std::string aux_reference;
  std::string aux_autocot;
  std::string aux_metrics;
};

inline nlohmann::json pack_to_json(const TemplatePack& p) {
  return {{"task_family", p.task_family},
          {"context_fields", p.context_fields},
          {"candidate_field", p.candidate_field},
          {"components", {{"td", p.td_blocks}, {"er", p.er_blocks}, {"ic", p.ic_blocks}}},
          {"fragments",
           {{"reference_intro", p.reference_intro},
            {"reference_block", p.reference_block},
            {"reference_dialectic", p.reference_dialectic},
            {"cot_none", p.cot_none},
            {"cot_prefix", p.cot_prefix},
            {"cot_suffix", p.cot_suffix},
            {"autocot", p.autocot_fragment},
            {"examples_wrapper", p.examples_wrapper},
            {"example", p.example_fragment},
            {"metrics", p.metrics_fragment},
            {"criteria_self", p.criteria_self}}},
          {"aux",
           {{"reference", p.aux_reference}, {"autocot", p.aux_autocot}, {"metrics", p.aux_metrics}}}};
}

inline TemplatePack pack_from_json(const nlohmann::json& j) {
  TemplatePack p;
  p.task_family = j.at("task_family").get<std::string>();
  p.context_fields = j.at("context_fields").get<std::vector<std::string>>();
  p.candidate_field = j.at("candidate_field").get<std::string>();
  const auto& c = j.at("components");
  p.td_blocks = c.at("td").get<std::vector<std::string>>();
  p.er_blocks = c.at("er").get<std::vector<std::string>>();
  p.ic_blocks = c.at("ic").get<std::vector<std::string>>();
  const auto& f = j.at("fragments");
  p.reference_intro = f.at("reference_intro").get<std::string>();
  p.reference_block = f.at("reference_block").get<std::string>();
  p.reference_dialectic = f.at("reference_dialectic").get<std::string>();
  p.cot_none = f.at("cot_none").get<std::string>();
  p.cot_prefix = f.at("cot_prefix").get<std::string>();
  p.cot_suffix = f.at("cot_suffix").get<std::string>();
  p.autocot_fragment = f.at("autocot").get<std::string>();
  p.examples_wrapper = f.at("examples_wrapper").get<std::string>();
  p.example_fragment = f.at("example").get<std::string>();
  p.metrics_fragment = f.at("metrics").get<std::string>();
  p.criteria_self = f.value("criteria_self", std::string{});
  const auto& a = j.at("aux");
  p.aux_reference = a.value("reference", std::string{});
  p.aux_autocot = a.value("autocot", std::string{});
  p.aux_metrics = a.value("metrics", std::string{});
  return p;
}

inline TemplatePack load_pack(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open template pack '" + path.string() + "'");
  nlohmann::json j;
  in >> j;
  return pack_from_json(j);
}

namespace packs {

inline TemplatePack summarization() {
  TemplatePack p;
  p.task_family = "summarization";
  p.context_fields = {"article"};
  p.candidate_field = "summary";

  p.td_blocks = {
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of the summary of the news article "
      "displayed below on its {aspect}.{reference_intro}{reference_dialectic}{cot}"};
  p.er_blocks = {
      "Here are some rules of the evaluation:\n"
      "1. Your evaluation should consider the {aspect} of the summary.{criteria}\n"
      "2. Be as objective as possible.",
      "{autocot}"};
  p.ic_blocks = {"{examples}",
                 "## Article\n{article}",
                 "{metrics}",
                 "{reference_block}",
                 "## The Start of the Summary\n{summary}\n## The End of the Summary"};

  p.reference_intro =
      "You will be given the news article, the summary, and a high-quality reference summary.";
  p.reference_block = "## The Start of Reference Summary\n{reference}\n## The End of Reference Summary";
  p.reference_dialectic =
      "Please generate your own summary for the news article first and take into account your own "
      "summary to evaluate the quality of the given summary.";
  p.cot_none =
      "You must directly output your rating of the summary on a scale of 1 to {max} without any "
      "explanation by strictly following this format: \"[[rating]]\", for example: \"Rating: [[{max}]]\".";
  p.cot_prefix =
      "Begin your evaluation by providing a short explanation. After providing your explanation, you "
      "must rate the summary on a scale of 1 to {max} by strictly following this format: "
      "\"[[rating]]\", for example: \"Rating: [[{max}]]\".";
  p.cot_suffix =
      "You must rate the summary on a scale of 1 to {max} first by strictly following this format: "
      "\"[[rating]]\", for example: \"Rating: [[{max}]]\". And then provide your explanation.";
  p.autocot_fragment = "Evaluation Steps:\n{autocot}";
  p.examples_wrapper =
      "Here are some examples and their corresponding ratings:\n"
      "{example_list}\n\n"
      "Following these examples, evaluate the quality of the summary of the news article displayed "
      "below on its {aspect}:";
  p.example_fragment =
      "## Example {number}:\n"
      "## Article\n{article}\n\n"
      "## The Start of the Summary\n{summary}\n## The End of the Summary\n\n"
      "## Rating\n{rating}";
  p.metrics_fragment =
      "## Questions about Summary\n"
      "Here are some questions about the summary. You can do the evaluation based on thinking about "
      "all the questions.\n{metrics}";
  p.criteria_self =
      "Please first propose your own evaluation criteria for this aspect and then evaluate the "
      "summary strictly according to them.";

  p.aux_reference = "Please summarize the following text: {article}\nSummary:";
  p.aux_autocot =
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of the summary of the news article "
      "on its {aspect} and rate the summary on a scale of 1 to {max}.\n\n"
      "Here are some rules of the evaluation:\n"
      "1. Your evaluation should consider the {aspect} of the summary.{criteria}\n"
      "2. Be as objective as possible.\n\n"
      "Please generate the evaluation steps for this task without other explanation.\n"
      "Evaluation Steps:";
  p.aux_metrics =
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of the summary of the news article "
      "displayed below on its {aspect}. Please propose at most three concise questions about whether "
      "a potential summary is a good summary for a given news article on its {aspect}. Another "
      "assistant will evaluate the aspect of the summary by answering all the questions.\n\n"
      "Here are some rules of the evaluation:\n"
      "(1) Your evaluation should consider the {aspect} of the summary.{criteria}\n"
      "(2) Outputs should NOT contain more/less than what the instruction asks for, as such outputs "
      "do NOT precisely execute the instruction.\n\n"
      "## Article:\n{article}\n\n"
      "## Requirements for Your Output:\n"
      "(1) The questions should **specifically** target the given news article instead of some "
      "general standards so that the questions may revolve around key points of the news article.\n"
      "(2) You should directly give the questions without any other words.\n"
      "(3) Questions are presented from most important to least important.";
  return p;
}

inline TemplatePack dialogue() {
  TemplatePack p;
  p.task_family = "dialogue";
  p.context_fields = {"conversation", "fact"};
  p.candidate_field = "response";

  p.td_blocks = {
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of the response for the next turn "
      "in the conversation displayed below on its {aspect}. The response concerns an interesting "
      "fact, which will be provided as well.{reference_intro}{reference_dialectic}{cot}"};
  p.er_blocks = {
      "Here are some rules of the evaluation:\n"
      "1. Your evaluation should consider the {aspect} of the response.{criteria}\n"
      "2. Be as objective as possible.",
      "{autocot}"};
  p.ic_blocks = {"{examples}",
                 "## Conversation History\n{conversation}",
                 "{metrics}",
                 "## Corresponding Fact\n{fact}",
                 "{reference_block}",
                 "## The Start of Response\n{response}\n## The End of the Response"};

  p.reference_intro = "You will also be given a high-quality reference response with the conversation.";
  p.reference_block = "## The Start of Reference Response\n{reference}\n## The End of Reference Response";
  p.reference_dialectic =
      "Please generate your own response for the next turn in the conversation first and take into "
      "account your own response to evaluate the quality of the given response.";
  p.cot_none =
      "You must directly output your rating of the response on a scale of 1 to {max} without any "
      "explanation by strictly following this format: \"[[rating]]\", for example: \"Rating: [[{max}]]\".";
  p.cot_prefix =
      "Begin your evaluation by providing a short explanation. After providing your explanation, you "
      "must rate the response on a scale of 1 to {max} by strictly following this format: "
      "\"[[rating]]\", for example: \"Rating: [[{max}]]\".";
  p.cot_suffix =
      "You must rate the response on a scale of 1 to {max} first by strictly following this format: "
      "\"[[rating]]\", for example: \"Rating: [[{max}]]\". And then provide your explanation.";
  p.autocot_fragment = "Evaluation Steps:\n{autocot}";
  p.examples_wrapper =
      "Here are some examples and their corresponding ratings:\n"
      "{example_list}\n\n"
      "Following these examples, evaluate the quality of the response for the next turn in the "
      "conversation displayed below on its {aspect}:";
  p.example_fragment =
      "## Example {number}:\n"
      "## Conversation History\n{conversation}\n\n"
      "## Corresponding Fact\n{fact}\n\n"
      "## The Start of the Response\n{response}\n## The End of the Response\n\n"
      "## Rating\n{rating}";
  p.metrics_fragment =
      "## Questions about Response\n"
      "Here are some questions about the response. You can do the evaluation based on thinking about "
      "all the questions.\n{metrics}";
  p.criteria_self =
      "Please first propose your own evaluation criteria for this aspect and then evaluate the "
      "response strictly according to them.";

  p.aux_reference =
      "Please output the response for the next turn in the conversation. Conversation History: "
      "{conversation}\nResponse:";
  p.aux_autocot =
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of the response for the next turn "
      "in the conversation on its {aspect} and rate the response on a scale of 1 to {max}.\n\n"
      "Here are some rules of the evaluation:\n"
      "1. Your evaluation should consider the {aspect} of the response.{criteria}\n"
      "2. Be as objective as possible.\n\n"
      "Please generate the evaluation steps for this task without other explanation.\n"
      "Evaluation Steps:";
  p.aux_metrics =
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of the response for the next turn "
      "in the conversation displayed below on its {aspect}. Please propose at most three concise "
      "questions about whether a potential response is a good response for the next turn in the "
      "given conversation on its {aspect}. Another assistant will evaluate the aspect of the output "
      "by answering all the questions.\n\n"
      "Here are some rules of the evaluation:\n"
      "(1) Your evaluation should consider the {aspect} of the response.{criteria}\n"
      "(2) Outputs should NOT contain more/less than what the instruction asks for, as such outputs "
      "do NOT precisely execute the instruction.\n\n"
      "## Conversation History:\n{conversation}\n\n"
      "## Requirements for Your Output:\n"
      "(1) The questions should **specifically** target the given conversation instead of some "
      "general standards, so the questions may revolve around key points of the conversation.\n"
      "(2) You should directly give the questions without any other words.\n"
      "(3) Questions are presented from most important to least important.";
  return p;
}

inline TemplatePack data2text() {
  TemplatePack p;
  p.task_family = "data2text";
  p.context_fields = {"expression"};
  p.candidate_field = "sentence";

  p.td_blocks = {
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of a natural language sentence "
      "generated according to a structured data expression displayed below on its "
      "{aspect}.{reference_intro}{reference_dialectic}{cot}"};
  p.er_blocks = {
      "Here are some rules of the evaluation:\n"
      "1. Your evaluation should consider the {aspect} of the sentence.{criteria}\n"
      "2. Be as objective as possible.",
      "{autocot}"};
  p.ic_blocks = {"{examples}",
                 "## Structured Data Expression\n{expression}",
                 "{metrics}",
                 "{reference_block}",
                 "## The Start of the Natural Language Sentence\n{sentence}\n"
                 "## The End of the Natural Language Sentence"};

  p.reference_intro =
      "You will be given the structured data expression, the sentence and a high-quality reference "
      "sentence.";
  p.reference_block = "## The Start of Reference Sentence\n{reference}\n## The End of Reference Sentence";
  p.reference_dialectic =
      "Please generate your own sentence according to the given structured data expression first and "
      "take into account your own sentence to evaluate the quality of the given sentence.";
  p.cot_none =
      "You must directly output your rating of the sentence on a scale of 1 to {max} without any "
      "explanation by strictly following this format: \"[[rating]]\", for example: \"Rating: [[{max}]]\".";
  p.cot_prefix =
      "Begin your evaluation by providing a short explanation. After providing your explanation, you "
      "must rate the sentence on a scale of 1 to {max} by strictly following this format: "
      "\"[[rating]]\", for example: \"Rating: [[{max}]]\".";
  p.cot_suffix =
      "You must rate the sentence on a scale of 1 to {max} first by strictly following this format: "
      "\"[[rating]]\", for example: \"Rating: [[{max}]]\". And then provide your explanation.";
  p.autocot_fragment = "Evaluation Steps:\n{autocot}";
  p.examples_wrapper =
      "Here are some examples and their corresponding ratings:\n"
      "{example_list}\n\n"
      "Following these examples, evaluate the quality of a natural language sentence generated "
      "according to a structured data expression displayed below on its {aspect}:";
  p.example_fragment =
      "## Example {number}:\n"
      "## Structured Data Expression\n{expression}\n\n"
      "## The Start of the Natural Language Sentence\n{sentence}\n"
      "## The End of the Natural Language Sentence\n\n"
      "## Rating\n{rating}";
  p.metrics_fragment =
      "## Questions about Sentence\n"
      "Here are some questions about the sentence. You can do the evaluation based on thinking about "
      "all the questions.\n{metrics}";
  p.criteria_self =
      "Please first propose your own evaluation criteria for this aspect and then evaluate the "
      "sentence strictly according to them.";

  p.aux_reference =
      "Please generate a natural language sentence generated according to a structured data "
      "expression. Expression: {expression}\nSentence:";
  p.aux_autocot =
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of a natural language sentence "
      "generated according to a structured data expression displayed below on its {aspect} and rate "
      "the sentence on a scale of 1 to {max}.\n\n"
      "Here are some rules of the evaluation:\n"
      "1. Your evaluation should consider the {aspect} of the sentence.{criteria}\n"
      "2. Be as objective as possible.\n\n"
      "Please generate the evaluation steps for this task without other explanation.\n"
      "Evaluation Steps:";
  p.aux_metrics =
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of a natural language sentence "
      "generated according to a structured data expression displayed below on its {aspect}. Please "
      "propose at most three concise questions about whether a potential sentence is a good sentence "
      "generated according to a given structured data expression on its {aspect}. Another assistant "
      "will evaluate the aspects of the sentence by answering all the questions.\n\n"
      "Here are some rules of the evaluation:\n"
      "(1) Your evaluation should consider the {aspect} of the sentence.{criteria}\n"
      "(2) Outputs should NOT contain more/less than what the instruction asks for, as such outputs "
      "do NOT precisely execute the instruction.\n\n"
      "## Structured Data Expression:\n{expression}\n\n"
      "## Requirements for Your Output:\n"
      "(1) The questions should **specifically** target the given structured data expression instead "
      "of some general standards, so the questions may revolve around key points of the structured "
      "data expressions.\n"
      "(2) You should directly give the questions without any other words.\n"
      "(3) Questions are presented from most important to least important.";
  return p;
}

inline TemplatePack story() {
  TemplatePack p;
  p.task_family = "story";
  p.context_fields = {"prompt"};
  p.candidate_field = "story";

  p.td_blocks = {
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of the story generated according to "
      "a prompt displayed below on its {aspect}.{reference_intro}{reference_dialectic}{cot}"};
  p.er_blocks = {
      "Here are some rules of the evaluation:\n"
      "1. Your evaluation should consider the {aspect} of the story.{criteria}\n"
      "2. Be as objective as possible.",
      "{autocot}"};
  p.ic_blocks = {"{examples}",
                 "## Prompt\n{prompt}",
                 "{metrics}",
                 "{reference_block}",
                 "## The Start of the Story\n{story}\n## The End of the Story"};

  p.reference_intro = "You will be given the prompt, the generated story and a high-quality reference story.";
  p.reference_block = "## The Start of Reference Story\n{reference}\n## The End of Reference Story";
  p.reference_dialectic =
      "Please generate your own story for the given prompt first and take into account your own "
      "story to evaluate the quality of the given story.";
  p.cot_none =
      "You must directly output your rating of the story on a scale of 1 to {max} without any "
      "explanation by strictly following this format: \"[[rating]]\", for example: \"Rating: [[{max}]]\".";
  p.cot_prefix =
      "Begin your evaluation by providing a short explanation. After providing your explanation, you "
      "must rate the story on a scale of 1 to {max} by strictly following this format: "
      "\"[[rating]]\", for example: \"Rating: [[{max}]]\".";
  p.cot_suffix =
      "You must rate the story on a scale of 1 to {max} first by strictly following this format: "
      "\"[[rating]]\", for example: \"Rating: [[{max}]]\". And then provide your explanation.";
  p.autocot_fragment = "Evaluation Steps:\n{autocot}";
  p.examples_wrapper =
      "Here are some examples and their corresponding ratings:\n"
      "{example_list}\n\n"
      "Following these examples, evaluate the story generated according to a prompt displayed below "
      "on its {aspect}:";
  p.example_fragment =
      "## Example {number}:\n"
      "## Prompt\n{prompt}\n\n"
      "## The Start of the Story\n{story}\n## The End of the Story\n\n"
      "## Rating\n{rating}";
  p.metrics_fragment =
      "## Questions about Story\n"
      "Here are some questions about the story. You can do the evaluation based on thinking about "
      "all the questions.\n{metrics}";
  p.criteria_self =
      "Please first propose your own evaluation criteria for this aspect and then evaluate the "
      "story strictly according to them.";

  p.aux_reference = "Please generate a story according to the given prompt: {prompt}\nStory:";
  p.aux_autocot =
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of the story generated according to "
      "a prompt displayed below on its {aspect} and rate the story on a scale of 1 to {max}.\n\n"
      "Here are some rules of the evaluation:\n"
      "1. Your evaluation should consider the {aspect} of the story.{criteria}\n"
      "2. Be as objective as possible.\n\n"
      "Please generate the evaluation steps for this task without other explanation.\n"
      "Evaluation Steps:";
  p.aux_metrics =
      "## Instruction\n"
      "Please act as an impartial judge and evaluate the quality of the story generated according to "
      "a prompt displayed below on its {aspect}. Please propose at most three concise questions "
      "about whether a potential story is a good story according to a given prompt on its {aspect}. "
      "Another assistant will evaluate the aspect of the story by answering all the questions.\n\n"
      "Here are some rules of the evaluation:\n"
      "(1) Your evaluation should consider the {aspect} of the story.{criteria}\n"
      "(2) Outputs should NOT contain more/less than what the instruction asks for, as such outputs "
      "do NOT precisely execute the instruction.\n\n"
      "## Prompt:\n{prompt}\n\n"
      "## Requirements for Your Output:\n"
      "(1) The questions should **specifically** target the given prompt instead of some general "
      "standards, so the questions may revolve around key points of the prompt.\n"
      "(2) You should directly give the questions without any other words.\n"
      "(3) Questions are presented from most important to least important.";
  return p;
}

}  // namespace packs

inline std::vector<std::string> builtin_pack_families() {
  return {"summarization", "dialogue", "data2text", "story"};
}

inline TemplatePack builtin_pack(const std::string& task_family) {
  if (task_family == "summarization") return packs::summarization();
  if (task_family == "dialogue") return packs::dialogue();
  if (task_family == "data2text") return packs::data2text();
  if (task_family == "story") return packs::story();
  throw ConfigError("no builtin template pack for task family '" + task_family + "'");
}

}  // namespace hpss
