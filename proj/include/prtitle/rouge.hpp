#pragma once

// ROUGE-1/2/L scoring and the tokenizer shared by the whole pipeline.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace prtitle::rouge {

using TokenSequence = std::vector<std::string>;

/// Byte range [begin, end) of one token inside the original UTF-8 text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Lowercases, maps every code point that is not a Unicode letter or digit to
/// a separator, and splits. Invalid UTF-8 bytes count as separators.
TokenSequence tokenize(std::string_view text);

/// Same token boundaries as tokenize(), reported against the original bytes.
std::vector<TokenSpan> token_spans(std::string_view text);

std::size_t count_tokens(std::string_view text);

/// Longest prefix of `text` holding at most `max_tokens` tokens, cut right
/// after the last kept token. Returns `text` unchanged when it already fits.
std::string_view token_prefix(std::string_view text, std::size_t max_tokens);

struct Overlap {
  std::size_t overlap = 0;
  std::size_t ref_count = 0;
  std::size_t gen_count = 0;
};

/// Clipped multiset intersection of the n-grams of both sequences.
Overlap ngram_overlap(const TokenSequence& ref, const TokenSequence& gen,
                      std::size_t n);

struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

/// Builds a score from the two ratios; 0/0 is 0 everywhere.
RougeScore make_score(std::size_t matched, std::size_t ref_len,
                      std::size_t gen_len);

RougeScore rouge_n(const TokenSequence& ref, const TokenSequence& gen,
                   std::size_t n);

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b);

RougeScore rouge_l(const TokenSequence& ref, const TokenSequence& gen);

struct RougeReport {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;
  std::size_t n_examples = 0;
};

struct ExampleScores {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;
};

ExampleScores score_pair(std::string_view ref_text, std::string_view gen_text);

/// Arithmetic mean of per-example recall, precision and F1.
/// Throws Error(EmptyCorpus) when `pairs` is empty.
RougeReport corpus_rouge(
    const std::vector<std::pair<std::string, std::string>>& pairs);

RougeReport mean_report(const std::vector<ExampleScores>& examples);

/// Value scaled by 100 with two decimals, e.g. 0.4722 -> "47.22".
std::string format_percent(double value);

}  // namespace prtitle::rouge
