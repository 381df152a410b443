#include "prtitle/rouge.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <unordered_map>

#include "prtitle/error.hpp"
#include "prtitle/utf8.hpp"

namespace prtitle::rouge {
namespace {

// Tokens are alphanumeric only, so the unit separator cannot collide.
constexpr char kJoin = '\x1f';

std::unordered_map<std::string, std::size_t> ngram_counts(
    const TokenSequence& tokens, std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      key.push_back(kJoin);
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<TokenSpan> token_spans(std::string_view text) {
  std::vector<TokenSpan> spans;
  std::size_t pos = 0;
  bool in_token = false;
  std::size_t start = 0;
  while (pos < text.size()) {
    const auto [cp, len] = utf8::decode(text, pos);
    if (utf8::is_alnum(cp)) {
      if (!in_token) {
        start = pos;
        in_token = true;
      }
    } else if (in_token) {
      spans.push_back({start, pos});
      in_token = false;
    }
    pos += len;
  }
  if (in_token) spans.push_back({start, text.size()});
  return spans;
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence tokens;
  for (const auto& span : token_spans(text)) {
    std::string token;
    token.reserve(span.end - span.begin);
    for (std::size_t pos = span.begin; pos < span.end;) {
      const auto [cp, len] = utf8::decode(text, pos);
      utf8::append(token, utf8::to_lower(cp));
      pos += len;
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::size_t count_tokens(std::string_view text) {
  return token_spans(text).size();
}

std::string_view token_prefix(std::string_view text, std::size_t max_tokens) {
  const auto spans = token_spans(text);
  if (spans.size() <= max_tokens) return text;
  if (max_tokens == 0) return text.substr(0, 0);
  return text.substr(0, spans[max_tokens - 1].end);
}

Overlap ngram_overlap(const TokenSequence& ref, const TokenSequence& gen,
                      std::size_t n) {
  Overlap result;
  result.ref_count = ref.size() >= n ? ref.size() - n + 1 : 0;
  result.gen_count = gen.size() >= n ? gen.size() - n + 1 : 0;
  const auto ref_counts = ngram_counts(ref, n);
  const auto gen_counts = ngram_counts(gen, n);
  for (const auto& [gram, count] : ref_counts) {
    if (auto it = gen_counts.find(gram); it != gen_counts.end()) {
      result.overlap += std::min(count, it->second);
    }
  }
  return result;
}

RougeScore make_score(std::size_t matched, std::size_t ref_len,
                      std::size_t gen_len) {
  RougeScore score;
  score.recall = ratio(matched, ref_len);
  score.precision = ratio(matched, gen_len);
  const double sum = score.recall + score.precision;
  score.f1 = sum > 0.0 ? 2.0 * score.recall * score.precision / sum : 0.0;
  return score;
}

RougeScore rouge_n(const TokenSequence& ref, const TokenSequence& gen,
                   std::size_t n) {
  const auto o = ngram_overlap(ref, gen, n);
  return make_score(o.overlap, o.ref_count, o.gen_count);
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
  if (a.empty() || b.empty()) return 0;
  // Two rolling rows over the shorter side.
  const auto& outer = a.size() >= b.size() ? a : b;
  const auto& inner = a.size() >= b.size() ? b : a;
  std::vector<std::size_t> prev(inner.size() + 1, 0);
  std::vector<std::size_t> curr(inner.size() + 1, 0);
  for (const auto& x : outer) {
    for (std::size_t j = 1; j <= inner.size(); ++j) {
      curr[j] = x == inner[j - 1] ? prev[j - 1] + 1
                                  : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[inner.size()];
}

RougeScore rouge_l(const TokenSequence& ref, const TokenSequence& gen) {
  return make_score(lcs_length(ref, gen), ref.size(), gen.size());
}

ExampleScores score_pair(std::string_view ref_text,
                         std::string_view gen_text) {
  const auto ref = tokenize(ref_text);
  const auto gen = tokenize(gen_text);
  return {rouge_n(ref, gen, 1), rouge_n(ref, gen, 2), rouge_l(ref, gen)};
}

RougeReport mean_report(const std::vector<ExampleScores>& examples) {
  if (examples.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "no examples to aggregate");
  }
  RougeReport report;
  auto accumulate = [](RougeScore& sum, const RougeScore& s) {
    sum.recall += s.recall;
    sum.precision += s.precision;
    sum.f1 += s.f1;
  };
  for (const auto& e : examples) {
    accumulate(report.rouge1, e.rouge1);
    accumulate(report.rouge2, e.rouge2);
    accumulate(report.rougeL, e.rougeL);
  }
  const double n = static_cast<double>(examples.size());
  for (RougeScore* s : {&report.rouge1, &report.rouge2, &report.rougeL}) {
    s->recall /= n;
    s->precision /= n;
    s->f1 /= n;
  }
  report.n_examples = examples.size();
  return report;
}

RougeReport corpus_rouge(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyCorpus, "no pairs to score");
  std::vector<ExampleScores> examples;
  examples.reserve(pairs.size());
  for (const auto& [ref, gen] : pairs) examples.push_back(score_pair(ref, gen));
  return mean_report(examples);
}

std::string format_percent(double value) {
  return fmt::format("{:.2f}", value * 100.0);
}

}  // namespace prtitle::rouge
