#include "mmrag/augment/prompt.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "mmrag/errors.hpp"

namespace mmrag::augment {

const std::string_view kEvaluationTemplate =
    "Generate a JSON with the query_answer, the answer provided behind the letters: A, B, C, and D. "
    "These are the values. Additional information if provided in the Context below. If the Context is "
    "not empty, analyse it and choose from the letters. MAKE SURE your output is one of the four values "
    "stated. Here is the query: {question}. Here are the choices: {question_string} \n"
    "    Context:\n";

std::string question_string(const std::vector<std::string>& displayed_options) {
  std::string out;
  for (std::size_t i = 0; i < displayed_options.size(); ++i) {
    if (i > 0) out += ' ';
    out += fmt::format("{}: {}", corpus::to_char(corpus::letter_at(i)), displayed_options[i]);
  }
  return out;
}

namespace {

std::string instantiate(std::string_view question, std::string_view options) {
  std::string out(kEvaluationTemplate);
  const auto replace = [&out](std::string_view key, std::string_view value) {
    const auto pos = out.find(key);
    out.replace(pos, key.size(), value);
  };
  // {question_string} first: {question} is a prefix of it.
  replace("{question_string}", options);
  replace("{question}", question);
  return out;
}

struct Evidence {
  std::string text;
  double score;
  std::size_t order;  // snippets before summaries, trace order within kind
};

std::string render(const std::string& head, const std::vector<Evidence>& evidence, const std::vector<bool>& kept) {
  std::string out = head;
  bool first = true;
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    if (!kept[i]) continue;
    if (!first) out += "\n\n";
    out += evidence[i].text;
    first = false;
  }
  return out;
}

}  // namespace

PromptPayload assemble_prompt(const corpus::BenchmarkItem& item, const ContextBundle& bundle,
                              const corpus::OptionOrder& order, const PromptLimits& limits,
                              const corpus::Tokenizer& tokenizer) {
  if (item.options.size() != corpus::kOptionCount) {
    throw PreconditionError(fmt::format("item '{}' does not have four options", item.id));
  }
  PromptPayload p;
  p.order = order;
  p.question = item.question;
  for (std::size_t i = 0; i < corpus::kOptionCount; ++i) p.displayed_options.push_back(item.options[order.original_at(i)]);

  const auto head = instantiate(item.question, question_string(p.displayed_options));

  std::vector<Evidence> evidence;
  for (const auto& s : bundle.text_snippets) evidence.push_back({s.text, s.score, evidence.size()});
  for (const auto& s : bundle.summaries) {
    if (!s.summary.text.empty()) evidence.push_back({s.summary.text, s.score, evidence.size()});
  }
  std::vector<bool> kept(evidence.size(), true);

  // Drop order: lowest score first; among equal scores the later item goes first.
  std::vector<std::size_t> drop(evidence.size());
  std::iota(drop.begin(), drop.end(), 0);
  std::stable_sort(drop.begin(), drop.end(), [&](std::size_t a, std::size_t b) {
    if (evidence[a].score != evidence[b].score) return evidence[a].score < evidence[b].score;
    return a > b;
  });

  p.text = render(head, evidence, kept);
  p.estimated_tokens = tokenizer.count(p.text);
  for (std::size_t next = 0; p.estimated_tokens > limits.context_ceiling; ++next) {
    if (next == drop.size()) {
      throw PreconditionError(fmt::format("prompt for item '{}' needs {} tokens without context; ceiling is {}",
                                          item.id, p.estimated_tokens, limits.context_ceiling));
    }
    kept[drop[next]] = false;
    ++p.dropped_evidence;
    p.truncated = true;
    p.text = render(head, evidence, kept);
    p.estimated_tokens = tokenizer.count(p.text);
  }

  for (const auto& img : bundle.images) {
    if (p.images.size() < limits.max_images) {
      p.images.push_back(img.image);
    } else {
      ++p.dropped_images;
    }
  }
  return p;
}

}  // namespace mmrag::augment
