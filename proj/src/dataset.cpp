#include "prtitle/dataset.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <random>
#include <regex>
#include <set>
#include <thread>

#include "prtitle/assembly.hpp"
#include "prtitle/error.hpp"
#include "prtitle/rouge.hpp"
#include "prtitle/utf8.hpp"

namespace prtitle::dataset {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(const PrRecord& r) {
  json j = {{"repo", r.repo.full_name()},
            {"number", r.number},
            {"title", r.title},
            {"commit_subjects", r.commit_subjects},
            {"linked_issue_titles", r.linked_issue_titles},
            {"created_at", format_iso8601(r.created_at)}};
  if (r.description) j["description"] = *r.description;
  if (!r.author.empty()) j["author"] = r.author;
  return j;
}

github::RepoRef parse_repo(std::string_view full_name) {
  const auto slash = full_name.find('/');
  if (slash == std::string_view::npos) {
    throw Error(ErrorCode::InvalidRequest,
                "expected owner/name, got " + std::string(full_name));
  }
  return github::RepoRef::make(full_name.substr(0, slash), full_name.substr(slash + 1));
}

PrRecord record_from_json(const json& j) {
  PrRecord r;
  r.repo = parse_repo(j.at("repo").get<std::string>());
  r.number = j.at("number").get<std::uint64_t>();
  r.title = j.at("title").get<std::string>();
  if (auto it = j.find("description"); it != j.end() && !it->is_null()) {
    r.description = it->get<std::string>();
  }
  r.commit_subjects = j.value("commit_subjects", std::vector<std::string>{});
  r.linked_issue_titles = j.value("linked_issue_titles", std::vector<std::string>{});
  const auto created = j.at("created_at").get<std::string>();
  auto ts = parse_iso8601(created);
  if (!ts) throw Error(ErrorCode::DecodeError, "bad created_at: " + created);
  r.created_at = *ts;
  r.author = j.value("author", std::string{});
  return r;
}

json to_json(const RepoFailure& f) {
  return {{"repo", f.repo}, {"error", f.error}, {"detail", f.detail}};
}

RepoFailure failure_from_json(const json& j) {
  return {j.at("repo").get<std::string>(), j.at("error").get<std::string>(),
          j.value("detail", std::string{})};
}

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_for_read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for reading");
  return in;
}

void check_written(const std::ofstream& out, const fs::path& path) {
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

// Unbiased draw from [0, bound) on top of the fully specified mt19937_64.
std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = gen();
    if (r >= threshold) return r % bound;
  }
}

// Checkpoint lines: {"repo": "...", "status": "done", "records": [...]}
// or {"repo": "...", "status": "failed", "error": "...", "detail": "..."}.
class Checkpoint {
 public:
  explicit Checkpoint(std::optional<fs::path> path) : path_(std::move(path)) {
    if (!path_ || !fs::exists(*path_)) return;
    auto in = open_for_read(*path_);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || j.value("status", "") != "done") {
        if (j.is_discarded()) spdlog::warn("ignoring checkpoint line {}", line_no);
        continue;
      }
      std::vector<PrRecord> records;
      for (const auto& r : j.at("records")) records.push_back(record_from_json(r));
      done_[j.at("repo").get<std::string>()] = std::move(records);
    }
  }

  const std::vector<PrRecord>* find(const std::string& repo) const {
    auto it = done_.find(repo);
    return it == done_.end() ? nullptr : &it->second;
  }

  void append(const json& entry) {
    if (!path_) return;
    std::lock_guard lock(mutex_);
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorCode::Io, "cannot append to " + path_->string());
    out << entry.dump() << '\n';
    out.flush();
    check_written(out, *path_);
  }

 private:
  std::optional<fs::path> path_;
  std::map<std::string, std::vector<PrRecord>> done_;
  std::mutex mutex_;
};

std::vector<PrRecord> crawl_repo(const github::RepoRef& repo,
                                 const github::Client& client, Timestamp cutoff) {
  std::vector<github::PullSummary> pulls;
  client.list_pulls(repo, [&](const github::PullSummary& pr) {
    // Listing is oldest first, so the first PR at or past the cutoff ends it.
    if (pr.created_at >= cutoff) return false;
    pulls.push_back(pr);
    return true;
  });

  std::vector<PrRecord> records;
  for (const auto& pr : pulls) {
    if (pr.created_at >= cutoff) continue;
    PrRecord record;
    record.repo = repo;
    record.number = pr.number;
    record.title = pr.title;
    record.description = pr.body;
    record.author = pr.author;
    record.created_at = pr.created_at;
    record.commit_subjects =
        assembly::extract_commit_subjects(client.fetch_pull_commits(repo, pr.number));
    if (pr.body) {
      for (auto n : github::linked_issue_numbers(*pr.body)) {
        try {
          record.linked_issue_titles.push_back(
              client.fetch_issue(github::ResourceLocator::issue(repo, n)).title);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::RateLimited) throw;
          spdlog::debug("skipping linked issue {}#{}: {}", repo.full_name(), n, e.what());
        }
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace

std::string PrRecord::id() const {
  return repo.full_name() + "#" + std::to_string(number);
}

void sort_records(std::vector<PrRecord>& records) {
  std::sort(records.begin(), records.end(), [](const PrRecord& a, const PrRecord& b) {
    return std::tie(a.repo, a.number) < std::tie(b.repo, b.number);
  });
}

RepoList dedupe_repos(const std::vector<RepoList>& segments) {
  RepoList out;
  std::set<github::RepoRef> seen;
  for (const auto& segment : segments) {
    for (const auto& entry : segment) {
      if (seen.insert(entry.repo).second) out.push_back(entry);
    }
  }
  return out;
}

RepoList load_repo_list(const fs::path& path) {
  auto in = open_for_read(path);
  RepoList list;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = assembly::trim(line.substr(0, line.find('#')));
    if (text.empty()) continue;
    const auto space = text.find_first_of(" \t");
    const auto name = text.substr(0, space);
    const auto source =
        space == std::string::npos ? std::string{} : assembly::trim(text.substr(space));
    try {
      list.push_back({parse_repo(name), source});
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidRequest,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return list;
}

Timestamp default_cutoff() {
  using namespace std::chrono;
  return sys_days{year{2022} / January / 1};
}

CrawlResult crawl_prs(const RepoList& repos, const github::Client& client,
                      const CrawlOptions& options,
                      const std::function<void(const PrRecord&)>& on_record) {
  Checkpoint checkpoint(options.checkpoint);
  std::vector<std::vector<PrRecord>> per_repo(repos.size());
  std::vector<std::optional<RepoFailure>> failures(repos.size());
  std::mutex emit_mutex;
  std::atomic<std::size_t> next{0};

  auto emit = [&](const std::vector<PrRecord>& records) {
    if (!on_record) return;
    std::lock_guard lock(emit_mutex);
    for (const auto& r : records) on_record(r);
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < repos.size(); i = next++) {
      const auto& repo = repos[i].repo;
      const auto name = repo.full_name();
      if (const auto* cached = checkpoint.find(name)) {
        for (const auto& r : *cached) {
          if (r.created_at < options.cutoff) per_repo[i].push_back(r);
        }
        emit(per_repo[i]);
        continue;
      }
      try {
        per_repo[i] = crawl_repo(repo, client, options.cutoff);
        json entry = {{"repo", name}, {"status", "done"}, {"records", json::array()}};
        for (const auto& r : per_repo[i]) entry["records"].push_back(to_json(r));
        checkpoint.append(entry);
        emit(per_repo[i]);
        spdlog::info("{}: {} pull requests", name, per_repo[i].size());
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Io) throw;
        per_repo[i].clear();
        failures[i] = RepoFailure{name, std::string(to_string(e.code())), e.what()};
        checkpoint.append({{"repo", name},
                           {"status", "failed"},
                           {"error", failures[i]->error},
                           {"detail", failures[i]->detail}});
        spdlog::warn("{}: crawl failed ({})", name, failures[i]->error);
      }
    }
  };

  const auto workers = std::clamp<std::size_t>(options.workers, 1, 64);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  CrawlResult result;
  for (std::size_t i = 0; i < repos.size(); ++i) {
    std::move(per_repo[i].begin(), per_repo[i].end(),
              std::back_inserter(result.records));
    if (failures[i]) result.failures.push_back(*failures[i]);
  }
  sort_records(result.records);
  return result;
}

std::string_view to_string(DropReason reason) noexcept {
  switch (reason) {
    case DropReason::BotAuthor: return "bot_author";
    case DropReason::TitleLength: return "title_length";
    case DropReason::TrivialTitle: return "trivial_title";
    case DropReason::NonAscii: return "non_ascii";
    case DropReason::EmptySource: return "empty_source";
  }
  return "unknown";
}

std::optional<DropReason> drop_reason(const PrRecord& record,
                                      const CleanOptions& options) {
  static const std::regex trivial(R"(^(update|bump|merge)\b)", std::regex::icase);

  if (options.drop_bots && record.author.size() >= 5 &&
      record.author.ends_with("[bot]")) {
    return DropReason::BotAuthor;
  }
  const auto title = assembly::trim(record.title);
  const auto tokens = rouge::count_tokens(title);
  if (options.check_title_length &&
      (tokens < options.min_title_tokens || tokens > options.max_title_tokens)) {
    return DropReason::TitleLength;
  }
  if (options.drop_trivial_titles && tokens <= options.trivial_max_tokens &&
      std::regex_search(title, trivial)) {
    return DropReason::TrivialTitle;
  }
  if (options.check_non_ascii && !title.empty()) {
    std::size_t total = 0;
    std::size_t non_ascii = 0;
    for (std::size_t pos = 0; pos < title.size();) {
      const auto [cp, len] = utf8::decode(title, pos);
      ++total;
      if (cp >= 0x80) ++non_ascii;
      pos += len;
    }
    if (static_cast<double>(non_ascii) / static_cast<double>(total) >
        options.max_non_ascii_ratio) {
      return DropReason::NonAscii;
    }
  }
  if (options.drop_empty_source) {
    try {
      assembly::build_source_sequence(record.description, record.commit_subjects,
                                      record.linked_issue_titles);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptySource) throw;
      return DropReason::EmptySource;
    }
  }
  return std::nullopt;
}

CleanResult clean(const std::vector<PrRecord>& records, const CleanOptions& options) {
  CleanResult result;
  for (const auto& record : records) {
    if (auto reason = drop_reason(record, options)) {
      result.dropped.push_back({record.id(), *reason});
    } else {
      result.kept.push_back(record);
    }
  }
  return result;
}

SplitCounts split_counts(std::size_t n, const SplitRatio& ratio) {
  const std::uint64_t sum = std::uint64_t{ratio[0]} + ratio[1] + ratio[2];
  if (sum == 0) throw Error(ErrorCode::InvalidRequest, "split ratio sums to zero");
  SplitCounts counts;
  counts.val = static_cast<std::size_t>(n * std::uint64_t{ratio[1]} / sum);
  counts.test = static_cast<std::size_t>(n * std::uint64_t{ratio[2]} / sum);
  counts.train = n - counts.val - counts.test;
  return counts;
}

CorpusManifest split(std::vector<std::string> record_ids, std::uint64_t seed,
                     const SplitRatio& ratio) {
  std::sort(record_ids.begin(), record_ids.end());
  record_ids.erase(std::unique(record_ids.begin(), record_ids.end()), record_ids.end());
  if (record_ids.empty()) throw Error(ErrorCode::EmptyCorpus, "nothing to split");

  std::mt19937_64 gen(seed);
  for (std::size_t i = record_ids.size() - 1; i > 0; --i) {
    std::swap(record_ids[i], record_ids[bounded(gen, i + 1)]);
  }

  CorpusManifest manifest;
  manifest.seed = seed;
  manifest.ratio = ratio;
  manifest.counts = split_counts(record_ids.size(), ratio);
  auto it = record_ids.begin();
  auto take = [&it](std::vector<std::string>& into, std::size_t n) {
    into.assign(std::make_move_iterator(it), std::make_move_iterator(it + n));
    it += static_cast<std::ptrdiff_t>(n);
  };
  take(manifest.train, manifest.counts.train);
  take(manifest.val, manifest.counts.val);
  take(manifest.test, manifest.counts.test);
  return manifest;
}

CorpusManifest split(const std::vector<PrRecord>& records, std::uint64_t seed,
                     const SplitRatio& ratio) {
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.id());
  return split(std::move(ids), seed, ratio);
}

fs::path manifest_path_for(const fs::path& corpus) {
  auto out = corpus;
  out.replace_extension(".manifest.json");
  return out;
}

void write_corpus(const std::vector<PrRecord>& records, const fs::path& path) {
  auto out = open_for_write(path);
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  out.flush();
  check_written(out, path);
}

std::vector<PrRecord> read_corpus(const fs::path& path) {
  auto in = open_for_read(path);
  std::vector<PrRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (assembly::trim(line).empty()) continue;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::DecodeError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_manifest(const CorpusManifest& m, const fs::path& path) {
  json j = {{"seed", m.seed},
            {"ratio", m.ratio},
            {"counts", {{"train", m.counts.train}, {"val", m.counts.val},
                        {"test", m.counts.test}}},
            {"filter_version", m.filter_version},
            {"train", m.train},
            {"val", m.val},
            {"test", m.test},
            {"failed_repos", json::array()},
            {"repos_without_records", m.repos_without_records}};
  for (const auto& f : m.failed_repos) j["failed_repos"].push_back(to_json(f));
  auto out = open_for_write(path);
  out << j.dump(2) << '\n';
  out.flush();
  check_written(out, path);
}

CorpusManifest read_manifest(const fs::path& path) {
  auto in = open_for_read(path);
  try {
    const auto j = json::parse(in);
    CorpusManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.ratio = j.at("ratio").get<SplitRatio>();
    const auto& c = j.at("counts");
    m.counts = {c.at("train").get<std::size_t>(), c.at("val").get<std::size_t>(),
                c.at("test").get<std::size_t>()};
    m.filter_version = j.value("filter_version", std::string{});
    m.train = j.at("train").get<std::vector<std::string>>();
    m.val = j.at("val").get<std::vector<std::string>>();
    m.test = j.at("test").get<std::vector<std::string>>();
    for (const auto& f : j.value("failed_repos", json::array())) {
      m.failed_repos.push_back(failure_from_json(f));
    }
    m.repos_without_records =
        j.value("repos_without_records", std::vector<std::string>{});
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::DecodeError, path.string() + ": " + e.what());
  }
}

void serialize(const std::vector<PrRecord>& records, const CorpusManifest& manifest,
               const fs::path& corpus_path) {
  write_corpus(records, corpus_path);
  write_manifest(manifest, manifest_path_for(corpus_path));
}

}  // namespace prtitle::dataset
