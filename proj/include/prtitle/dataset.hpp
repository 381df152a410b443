#pragma once

// Corpus construction: repository lists, crawling, cleaning, 8:1:1 splits and
// the JSONL / JSON on-disk formats.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prtitle/github.hpp"
#include "prtitle/timestamp.hpp"

namespace prtitle::dataset {

struct PrRecord {
  github::RepoRef repo;
  std::uint64_t number = 0;
  std::string title;
  std::optional<std::string> description;
  std::vector<std::string> commit_subjects;
  std::vector<std::string> linked_issue_titles;
  Timestamp created_at;
  /// Login of the PR author; empty when unknown.
  std::string author;

  /// "owner/name#number"
  std::string id() const;

  friend bool operator==(const PrRecord&, const PrRecord&) = default;
};

/// Canonical order: by repository, then number.
void sort_records(std::vector<PrRecord>& records);

struct RepoEntry {
  github::RepoRef repo;
  /// "most-starred", "most-forked" or "per-language:<lang>".
  std::string source;

  friend bool operator==(const RepoEntry&, const RepoEntry&) = default;
};

using RepoList = std::vector<RepoEntry>;

/// Concatenates the segments and keeps the first occurrence of each repo.
RepoList dedupe_repos(const std::vector<RepoList>& segments);

/// Reads "owner/name source" lines; blank lines and '#' comments are skipped.
/// Throws Error(Io) or Error(InvalidRequest) with the line number.
RepoList load_repo_list(const std::filesystem::path& path);

/// 2022-01-01T00:00:00Z
Timestamp default_cutoff();

struct RepoFailure {
  std::string repo;
  std::string error;
  std::string detail;

  friend bool operator==(const RepoFailure&, const RepoFailure&) = default;
};

struct CrawlOptions {
  Timestamp cutoff = default_cutoff();
  std::size_t workers = 4;
  /// JSONL log of finished repositories. Repositories already recorded as
  /// done are loaded from it instead of being fetched again.
  std::optional<std::filesystem::path> checkpoint;
};

struct CrawlResult {
  std::vector<PrRecord> records;  // canonical order
  std::vector<RepoFailure> failures;
};

/// Fetches every pull request created strictly before the cutoff. A failing
/// repository is recorded in `failures` and the crawl carries on. `on_record`
/// is called once per emitted record, never concurrently.
CrawlResult crawl_prs(const RepoList& repos, const github::Client& client,
                      const CrawlOptions& options,
                      const std::function<void(const PrRecord&)>& on_record = {});

enum class DropReason { BotAuthor, TitleLength, TrivialTitle, NonAscii, EmptySource };

/// Machine-readable reason code, e.g. "bot_author".
std::string_view to_string(DropReason reason) noexcept;

/// Identifies the filter set below in manifests.
inline constexpr std::string_view kFilterVersion = "clean-v1";

struct CleanOptions {
  bool drop_bots = true;
  bool check_title_length = true;
  bool drop_trivial_titles = true;
  bool check_non_ascii = true;
  bool drop_empty_source = true;
  std::size_t min_title_tokens = 2;
  std::size_t max_title_tokens = 20;
  std::size_t trivial_max_tokens = 3;
  double max_non_ascii_ratio = 0.5;
};

struct Dropped {
  std::string record_id;
  DropReason reason;
};

struct CleanResult {
  std::vector<PrRecord> kept;
  std::vector<Dropped> dropped;
};

/// First failing filter wins, checked in the order of DropReason.
std::optional<DropReason> drop_reason(const PrRecord& record,
                                      const CleanOptions& options = {});

CleanResult clean(const std::vector<PrRecord>& records,
                  const CleanOptions& options = {});

using SplitRatio = std::array<std::uint32_t, 3>;
inline constexpr SplitRatio kDefaultRatio{8, 1, 1};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;

  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

/// val = floor(N*r1/sum), test = floor(N*r2/sum), train takes the rest.
SplitCounts split_counts(std::size_t n, const SplitRatio& ratio = kDefaultRatio);

struct CorpusManifest {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
  SplitRatio ratio = kDefaultRatio;
  SplitCounts counts;
  std::string filter_version = std::string(kFilterVersion);
  std::vector<RepoFailure> failed_repos;
  /// Repositories whose every crawled PR was removed by clean().
  std::vector<std::string> repos_without_records;

  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

/// Sorts and dedupes the identifiers, shuffles them with a seeded
/// mt19937_64 Fisher-Yates pass, then assigns train, val, test in order.
/// Throws Error(EmptyCorpus) on empty input.
CorpusManifest split(std::vector<std::string> record_ids, std::uint64_t seed,
                     const SplitRatio& ratio = kDefaultRatio);

CorpusManifest split(const std::vector<PrRecord>& records, std::uint64_t seed,
                     const SplitRatio& ratio = kDefaultRatio);

/// "corpus.jsonl" -> "corpus.manifest.json"
std::filesystem::path manifest_path_for(const std::filesystem::path& corpus);

void write_corpus(const std::vector<PrRecord>& records,
                  const std::filesystem::path& path);
std::vector<PrRecord> read_corpus(const std::filesystem::path& path);

void write_manifest(const CorpusManifest& manifest,
                    const std::filesystem::path& path);
CorpusManifest read_manifest(const std::filesystem::path& path);

/// Writes the corpus to `corpus_path` and the manifest beside it.
void serialize(const std::vector<PrRecord>& records, const CorpusManifest& manifest,
               const std::filesystem::path& corpus_path);

}  // namespace prtitle::dataset
