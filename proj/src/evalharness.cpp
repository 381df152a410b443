#include "prtitle/evalharness.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "prtitle/error.hpp"

namespace prtitle::eval {
namespace {

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

nlohmann::json score_json(const rouge::RougeScore& s) {
  return {{"recall", s.recall}, {"precision", s.precision}, {"f1", s.f1}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

EvalRun evaluate(const std::vector<dataset::PrRecord>& corpus,
                 const dataset::CorpusManifest& manifest,
                 const summarizer::Backend& backend, std::size_t max_source_tokens) {
  if (manifest.test.empty()) throw Error(ErrorCode::EmptySplit, "test split is empty");
  std::map<std::string, const dataset::PrRecord*> by_id;
  for (const auto& r : corpus) by_id.emplace(r.id(), &r);

  const auto start = std::chrono::steady_clock::now();
  EvalRun run;
  run.backend_id = backend.id();
  std::vector<rouge::ExampleScores> scores;
  for (const auto& id : manifest.test) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::DecodeError, "test record " + id + " is not in the corpus");
    }
    const auto& record = *it->second;
    std::string title;
    try {
      auto seq = assembly::build_source_sequence(
          record.description, record.commit_subjects, record.linked_issue_titles);
      seq = assembly::truncate_to_budget(seq, max_source_tokens);
      title = backend.generate(seq);
    } catch (const Error& e) {
      spdlog::warn("excluding {}: {} ({})", id, to_string(e.code()), e.what());
      run.excluded.push_back(id);
      continue;
    }
    const auto s = rouge::score_pair(record.title, title);
    scores.push_back(s);
    run.per_example.push_back({id, title, s.rouge1.f1, s.rouge2.f1, s.rougeL.f1});
  }
  if (scores.empty()) {
    throw Error(ErrorCode::EmptySplit, "every test example failed to generate");
  }
  if (!run.excluded.empty()) {
    spdlog::warn("{} of {} test examples excluded", run.excluded.size(),
                 manifest.test.size());
  }
  run.report = rouge::mean_report(scores);
  run.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  return run;
}

EvalRun evaluate(const std::filesystem::path& corpus_path,
                 const std::filesystem::path& manifest_path,
                 const summarizer::Backend& backend, std::size_t max_source_tokens) {
  return evaluate(dataset::read_corpus(corpus_path),
                  dataset::read_manifest(manifest_path), backend, max_source_tokens);
}

std::string format_scores(const rouge::RougeReport& report) {
  return fmt::format("{} {} {}", rouge::format_percent(report.rouge1.f1),
                     rouge::format_percent(report.rouge2.f1),
                     rouge::format_percent(report.rougeL.f1));
}

std::string render_table(const std::vector<EvalRun>& runs) {
  std::size_t name_width = std::string_view("Approach").size();
  for (const auto& run : runs) name_width = std::max(name_width, run.backend_id.size());

  // cells[row][col] holds the 2-decimal text; the best is chosen on that text
  // so that rows which print the same value are marked the same way.
  std::vector<std::array<std::string, 3>> cells;
  std::array<double, 3> best{-1.0, -1.0, -1.0};
  for (const auto& run : runs) {
    const auto& r = run.report;
    std::array<std::string, 3> row{rouge::format_percent(r.rouge1.f1),
                                   rouge::format_percent(r.rouge2.f1),
                                   rouge::format_percent(r.rougeL.f1)};
    for (std::size_t c = 0; c < 3; ++c) best[c] = std::max(best[c], std::stod(row[c]));
    cells.push_back(std::move(row));
  }

  std::string out = fmt::format("{:<{}} | {:>8} | {:>8} | {:>8}\n", "Approach",
                                name_width, "ROUGE-1", "ROUGE-2", "ROUGE-L");
  out += std::string(name_width, '-') + "-+----------+----------+---------\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    out += fmt::format("{:<{}}", runs[i].backend_id, name_width);
    for (std::size_t c = 0; c < 3; ++c) {
      const bool is_best = std::stod(cells[i][c]) == best[c];
      out += fmt::format(" | {:>7}{}", cells[i][c], is_best ? "*" : " ");
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

std::string to_csv(const EvalRun& run) {
  std::string out = "record_id,generated_title,r1_f1,r2_f1,rl_f1\n";
  for (const auto& e : run.per_example) {
    out += fmt::format("{},{},{},{},{}\n", csv_field(e.record_id),
                       csv_field(e.generated_title), e.r1_f1, e.r2_f1, e.rl_f1);
  }
  return out;
}

std::string to_json(const EvalRun& run) {
  nlohmann::json j = {
      {"backend", run.backend_id},
      {"n_examples", run.report.n_examples},
      {"rouge1", score_json(run.report.rouge1)},
      {"rouge2", score_json(run.report.rouge2)},
      {"rougeL", score_json(run.report.rougeL)},
      {"excluded", run.excluded},
      {"wall_time_ms", run.wall_time.count()},
      {"per_example", nlohmann::json::array()},
  };
  for (const auto& e : run.per_example) {
    j["per_example"].push_back({{"record_id", e.record_id},
                                {"generated_title", e.generated_title},
                                {"r1_f1", e.r1_f1},
                                {"r2_f1", e.r2_f1},
                                {"rl_f1", e.rl_f1}});
  }
  return j.dump(2) + "\n";
}

std::pair<std::filesystem::path, std::filesystem::path> write_run_files(
    const EvalRun& run, const std::filesystem::path& corpus_path) {
  const auto dir = corpus_path.parent_path();
  const auto stem = corpus_path.stem().string() + "." + run.backend_id + ".eval";
  const auto csv = dir / (stem + ".csv");
  const auto js = dir / (stem + ".json");
  write_text(csv, to_csv(run));
  write_text(js, to_json(run));
  return {csv, js};
}

}  // namespace prtitle::eval
