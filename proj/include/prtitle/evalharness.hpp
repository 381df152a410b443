#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "prtitle/dataset.hpp"
#include "prtitle/rouge.hpp"
#include "prtitle/summarizer.hpp"

namespace prtitle::eval {

struct ExampleResult {
  std::string record_id;
  std::string generated_title;
  double r1_f1 = 0.0;
  double r2_f1 = 0.0;
  double rl_f1 = 0.0;
};

struct EvalRun {
  std::string backend_id;
  rouge::RougeReport report;
  std::vector<ExampleResult> per_example;
  /// Test records whose generation failed; they do not enter the means.
  std::vector<std::string> excluded;
  std::chrono::milliseconds wall_time{0};
};

/// Scores `backend` on the test records listed in `manifest`. Records named
/// by the manifest but missing from the corpus are an error (DecodeError).
/// Throws Error(EmptySplit) when the test split is empty or every example
/// failed.
EvalRun evaluate(const std::vector<dataset::PrRecord>& corpus,
                 const dataset::CorpusManifest& manifest,
                 const summarizer::Backend& backend,
                 std::size_t max_source_tokens = assembly::kDefaultMaxTokens);

EvalRun evaluate(const std::filesystem::path& corpus_path,
                 const std::filesystem::path& manifest_path,
                 const summarizer::Backend& backend,
                 std::size_t max_source_tokens = assembly::kDefaultMaxTokens);

/// Fixed-width table, one row per run; the best value of each column is
/// suffixed with '*'.
std::string render_table(const std::vector<EvalRun>& runs);

/// "47.22 25.27 43.12" for F1 means (0.4722, 0.2527, 0.4312).
std::string format_scores(const rouge::RougeReport& report);

std::string to_csv(const EvalRun& run);
std::string to_json(const EvalRun& run);

/// Writes <stem>.<backend>.eval.csv and <stem>.<backend>.eval.json next to
/// the corpus and returns both paths.
std::pair<std::filesystem::path, std::filesystem::path> write_run_files(
    const EvalRun& run, const std::filesystem::path& corpus_path);

}  // namespace prtitle::eval
