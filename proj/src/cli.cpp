#include "prtitle/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>

#include "prtitle/dataset.hpp"
#include "prtitle/error.hpp"
#include "prtitle/evalharness.hpp"
#include "prtitle/service.hpp"

namespace prtitle {
namespace {

namespace fs = std::filesystem;

struct BackendOptions {
  std::string backend = "extractive";
  std::string endpoint;
  std::size_t max_title_tokens = 12;
  long timeout_ms = 30000;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--backend", backend, "Title backend")
        ->check(CLI::IsMember({"extractive", "remote"}))
        ->capture_default_str();
    cmd.add_option("--endpoint", endpoint, "Model server URL for --backend remote");
    cmd.add_option("--max-title-tokens", max_title_tokens, "Title length limit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--backend-timeout-ms", timeout_ms, "Model server timeout")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  summarizer::BackendSpec spec() const {
    summarizer::BackendSpec s;
    s.id = *summarizer::parse_backend_id(backend);
    if (!endpoint.empty()) s.remote_endpoint = endpoint;
    s.max_title_tokens = max_title_tokens;
    s.timeout = std::chrono::milliseconds{timeout_ms};
    s.validate();
    return s;
  }
};

std::optional<std::string> env(const char* name) {
  if (const char* v = std::getenv(name); v && *v) return std::string(v);
  return std::nullopt;
}

service::HttpServer* g_server = nullptr;

extern "C" void handle_stop_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Suggest pull-request titles from commits, issues and descriptions"};
  app.name("prtitle");
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  std::string github_base = std::string(github::kDefaultApiOrigin);

  // generate
  auto* generate = app.add_subcommand("generate", "Suggest a title for one pull request");
  std::string pr_url;
  std::vector<std::string> issue_urls;
  std::string description;
  bool print_json = false;
  std::size_t max_source_tokens = assembly::kDefaultMaxTokens;
  BackendOptions gen_backend;
  generate->add_option("--pr-url", pr_url, "Compare or pull request URL")->required();
  generate->add_option("--issue-url", issue_urls, "Related issue URL (repeatable)");
  generate->add_option("--description", description, "Pull request description");
  generate->add_option("--github-base", github_base, "GitHub API origin")
      ->capture_default_str();
  generate->add_option("--max-source-tokens", max_source_tokens, "Source budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  generate->add_flag("--json", print_json, "Print the full response as JSON");
  gen_backend.add_to(*generate);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a backend on a test split");
  std::string corpus_path;
  std::string manifest_path;
  BackendOptions eval_backend;
  evaluate->add_option("--corpus", corpus_path, "Corpus JSONL")->required();
  evaluate->add_option("--manifest", manifest_path, "Split manifest JSON")->required();
  eval_backend.add_to(*evaluate);

  // dataset
  auto* dataset_cmd = app.add_subcommand("dataset", "Build or split a PR-title corpus");
  dataset_cmd->require_subcommand(1);

  auto* build = dataset_cmd->add_subcommand("build", "Crawl, clean and split");
  std::vector<std::string> repo_files;
  std::string out_path;
  std::string cutoff_text = "2022-01-01T00:00:00Z";
  std::uint64_t seed = 0;
  std::size_t workers = 4;
  std::string checkpoint;
  dataset::CleanOptions clean_options;
  bool keep_bots = false, no_length = false, no_trivial = false, no_ascii = false,
       no_empty = false;
  build->add_option("--repos", repo_files, "Repository list file(s), in priority order")
      ->required();
  build->add_option("--out", out_path, "Output corpus JSONL")->required();
  build->add_option("--cutoff", cutoff_text, "Keep PRs created before this UTC instant")
      ->capture_default_str();
  build->add_option("--seed", seed, "Split seed")->required();
  build->add_option("--workers", workers, "Concurrent repositories")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  build->add_option("--checkpoint", checkpoint,
                    "Resume file (default: <out>.checkpoint.jsonl)");
  build->add_option("--github-base", github_base, "GitHub API origin")
      ->capture_default_str();
  build->add_flag("--keep-bots", keep_bots, "Disable the bot-author filter");
  build->add_flag("--no-length-filter", no_length, "Disable the title-length filter");
  build->add_flag("--no-trivial-filter", no_trivial, "Disable the update/bump/merge filter");
  build->add_flag("--no-ascii-filter", no_ascii, "Disable the non-ASCII filter");
  build->add_flag("--no-empty-filter", no_empty, "Disable the empty-source filter");

  auto* split_cmd = dataset_cmd->add_subcommand("split", "Write an 8:1:1 manifest");
  std::string split_in;
  std::string split_out;
  std::uint64_t split_seed = 0;
  split_cmd->add_option("--in", split_in, "Corpus JSONL")->required();
  split_cmd->add_option("--seed", split_seed, "Shuffle seed")->required();
  split_cmd->add_option("--out", split_out, "Manifest path (default: beside the corpus)");

  auto* repos_cmd = dataset_cmd->add_subcommand("repos", "Merge and dedupe repository lists");
  std::vector<std::string> segments;
  std::string repos_out;
  repos_cmd->add_option("--segment", segments, "Repository list file(s)")->required();
  repos_cmd->add_option("--out", repos_out, "Merged list")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  int port = 8080;
  if (auto p = env("PRTITLE_PORT")) port = std::atoi(p->c_str());
  std::string host = "0.0.0.0";
  std::string static_dir;
  std::size_t max_issue_urls = 10;
  long cache_ttl_ms = 60000;
  long timeout_ms = 30000;
  BackendOptions serve_backend;
  serve->add_option("--port", port, "Listen port (env PRTITLE_PORT)")
      ->check(CLI::Range(1, 65535))
      ->capture_default_str();
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--static-dir", static_dir, "Web UI bundle served at /");
  serve->add_option("--github-base", github_base, "GitHub API origin")
      ->capture_default_str();
  serve->add_option("--max-issue-urls", max_issue_urls)->capture_default_str();
  serve->add_option("--cache-ttl-ms", cache_ttl_ms, "GitHub response cache TTL")
      ->capture_default_str();
  serve->add_option("--timeout-ms", timeout_ms, "GitHub request timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  serve->add_option("--max-source-tokens", max_source_tokens, "Source budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  serve_backend.add_to(*serve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (generate->parsed()) {
      service::ServiceConfig config;
      config.backend_spec = gen_backend.spec();
      config.github_base = github_base;
      config.token = github::ApiCredentials::from_env().token;
      config.cache_ttl = std::chrono::milliseconds{0};
      config.max_source_tokens = max_source_tokens;
      const service::GenerateService svc(config);
      assembly::GenerationRequest request{pr_url, issue_urls, std::nullopt};
      if (!description.empty()) request.description = description;
      const auto response = svc.generate(request);
      for (const auto& w : response.warnings) err << "warning: " << w << '\n';
      if (print_json) {
        out << service::to_json(response) << '\n';
      } else {
        out << response.title << '\n';
      }
      return 0;
    }

    if (evaluate->parsed()) {
      const auto backend = summarizer::make_backend(eval_backend.spec());
      const auto run = eval::evaluate(fs::path(corpus_path), fs::path(manifest_path), *backend);
      out << eval::render_table({run});
      if (!run.excluded.empty()) {
        err << "warning: " << run.excluded.size() << " example(s) excluded\n";
      }
      const auto [csv, js] = eval::write_run_files(run, corpus_path);
      err << "wrote " << csv.string() << " and " << js.string() << '\n';
      return 0;
    }

    if (build->parsed()) {
      const auto cutoff = parse_iso8601(cutoff_text);
      if (!cutoff) {
        err << "error: --cutoff must look like 2022-01-01T00:00:00Z\n";
        return 1;
      }
      std::vector<dataset::RepoList> lists;
      for (const auto& f : repo_files) lists.push_back(dataset::load_repo_list(f));
      const auto repos = dataset::dedupe_repos(lists);
      spdlog::info("{} distinct repositories", repos.size());

      dataset::CrawlOptions options;
      options.cutoff = *cutoff;
      options.workers = workers;
      options.checkpoint =
          checkpoint.empty() ? fs::path(out_path + ".checkpoint.jsonl") : fs::path(checkpoint);
      const github::Client client(github::ApiCredentials::from_env(), github_base);
      auto crawled = dataset::crawl_prs(repos, client, options);

      clean_options.drop_bots = !keep_bots;
      clean_options.check_title_length = !no_length;
      clean_options.drop_trivial_titles = !no_trivial;
      clean_options.check_non_ascii = !no_ascii;
      clean_options.drop_empty_source = !no_empty;
      auto cleaned = dataset::clean(crawled.records, clean_options);
      std::map<std::string, std::size_t> reasons;
      for (const auto& d : cleaned.dropped) ++reasons[std::string(dataset::to_string(d.reason))];
      for (const auto& [reason, n] : reasons) spdlog::info("dropped {} ({})", n, reason);

      auto manifest = dataset::split(cleaned.kept, seed);
      manifest.failed_repos = crawled.failures;
      std::set<std::string> with_records;
      for (const auto& r : crawled.records) with_records.insert(r.repo.full_name());
      for (const auto& r : cleaned.kept) with_records.erase(r.repo.full_name());
      manifest.repos_without_records.assign(with_records.begin(), with_records.end());
      dataset::serialize(cleaned.kept, manifest, out_path);
      out << cleaned.kept.size() << " records: " << manifest.counts.train << " train / "
          << manifest.counts.val << " val / " << manifest.counts.test << " test\n";
      return 0;
    }

    if (split_cmd->parsed()) {
      const auto records = dataset::read_corpus(split_in);
      const auto manifest = dataset::split(records, split_seed);
      const fs::path target =
          split_out.empty() ? dataset::manifest_path_for(split_in) : fs::path(split_out);
      dataset::write_manifest(manifest, target);
      out << manifest.counts.train << " train / " << manifest.counts.val << " val / "
          << manifest.counts.test << " test -> " << target.string() << '\n';
      return 0;
    }

    if (repos_cmd->parsed()) {
      std::vector<dataset::RepoList> lists;
      for (const auto& f : segments) lists.push_back(dataset::load_repo_list(f));
      const auto merged = dataset::dedupe_repos(lists);
      std::ofstream file(repos_out, std::ios::trunc);
      if (!file) throw Error(ErrorCode::Io, "cannot open " + repos_out + " for writing");
      for (const auto& e : merged) file << e.repo.full_name() << ' ' << e.source << '\n';
      if (!file) throw Error(ErrorCode::Io, "write failed for " + repos_out);
      out << merged.size() << " distinct repositories\n";
      return 0;
    }

    if (serve->parsed()) {
      service::ServiceConfig config;
      config.port = port;
      config.backend_spec = serve_backend.spec();
      config.github_base = github_base;
      config.token = github::ApiCredentials::from_env().token;
      config.max_issue_urls = max_issue_urls;
      config.cache_ttl = std::chrono::milliseconds{cache_ttl_ms};
      config.request_timeout = std::chrono::milliseconds{timeout_ms};
      config.max_source_tokens = max_source_tokens;
      if (!static_dir.empty()) config.static_dir = static_dir;
      config.validate();
      const service::GenerateService svc(config);
      service::HttpServer server(svc);
      if (server.bind(host, port) < 0) {
        err << "error: cannot listen on " << host << ":" << port << '\n';
        return 2;
      }
      g_server = &server;
      std::signal(SIGINT, handle_stop_signal);
      std::signal(SIGTERM, handle_stop_signal);
      spdlog::info("listening on {}:{} with the {} backend", host, port,
                   serve_backend.backend);
      server.listen();
      g_server = nullptr;
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidRequest ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace prtitle
