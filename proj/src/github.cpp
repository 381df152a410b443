#include "prtitle/github.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <regex>
#include <thread>

#include "prtitle/error.hpp"

namespace prtitle::github {
namespace {

using nlohmann::json;

bool valid_segment(std::string_view s) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [](unsigned char c) {
    return c == '/' || std::isspace(c);
  });
}

[[noreturn]] void malformed(std::string_view url, std::string_view why) {
  throw Error(ErrorCode::MalformedUrl,
              std::string(why) + ": " + std::string(url));
}

std::optional<std::uint64_t> parse_number(std::string_view text) {
  if (text.empty() ||
      !std::all_of(text.begin(), text.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    return std::nullopt;
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const auto next = path.find('/', pos);
    const auto end = next == std::string_view::npos ? path.size() : next;
    out.push_back(path.substr(pos, end - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string trim_copy(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n\f\v");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string origin_without_slash(std::string origin) {
  while (!origin.empty() && origin.back() == '/') origin.pop_back();
  return origin;
}

std::string repo_base(const RepoRef& repo, std::string_view origin) {
  return origin_without_slash(std::string(origin)) + "/repos/" + repo.owner +
         "/" + repo.name;
}

std::optional<std::chrono::seconds> retry_after(const http::Response& res) {
  if (auto value = res.header("retry-after")) {
    if (auto n = parse_number(*value)) return std::chrono::seconds(*n);
    if (*value == "0") return std::chrono::seconds(0);
  }
  return std::nullopt;
}

void check_status(const http::Response& res, const std::string& url) {
  if (res.status >= 200 && res.status < 300) return;
  const auto where = "HTTP " + std::to_string(res.status) + " from " + url;
  if (res.status == 404) throw Error(ErrorCode::NotFound, where);
  if (res.status == 403 || res.status == 429) {
    throw Error(ErrorCode::RateLimited, where, retry_after(res));
  }
  throw Error(ErrorCode::Upstream, where);
}

json decode_json(const http::Response& res, const std::string& url) {
  json doc = json::parse(res.body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::DecodeError, "invalid JSON from " + url);
  }
  return doc;
}

[[noreturn]] void decode_error(const std::string& url, std::string_view what) {
  throw Error(ErrorCode::DecodeError,
              "unexpected payload from " + url + ": " + std::string(what));
}

bool is_sha(const std::string& s) {
  return s.size() == 40 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

CommitRecord decode_commit(const json& item, const std::string& url) {
  if (!item.is_object()) decode_error(url, "commit entry is not an object");
  auto sha = item.find("sha");
  if (sha == item.end() || !sha->is_string() || !is_sha(sha->get<std::string>())) {
    decode_error(url, "commit sha missing or malformed");
  }
  auto detail = item.find("commit");
  if (detail == item.end() || !detail->is_object()) {
    decode_error(url, "commit details missing");
  }
  auto message = detail->find("message");
  if (message == detail->end() || !message->is_string()) {
    decode_error(url, "commit message missing");
  }
  return {sha->get<std::string>(), message->get<std::string>()};
}

std::uint64_t decode_positive(const json& obj, const char* key,
                              const std::string& url) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    decode_error(url, std::string(key) + " missing");
  }
  if (it->is_number_unsigned()) {
    auto v = it->get<std::uint64_t>();
    if (v > 0) return v;
  } else if (auto v = it->get<std::int64_t>(); v > 0) {
    return static_cast<std::uint64_t>(v);
  }
  decode_error(url, std::string(key) + " not positive");
}

std::optional<std::string> optional_text(const json& obj, const char* key,
                                         const std::string& url) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) decode_error(url, std::string(key) + " is not text");
  auto value = it->get<std::string>();
  if (trim_copy(value).empty()) return std::nullopt;
  return value;
}

std::string paged(const std::string& url, std::size_t page) {
  const char sep = url.find('?') == std::string::npos ? '?' : '&';
  return url + sep + "per_page=" + std::to_string(kPageSize) +
         "&page=" + std::to_string(page);
}

bool link_has_next(const http::Response& res) {
  auto link = res.header("link");
  return !link || link->find("rel=\"next\"") != std::string::npos;
}

// Upper bound on pages walked for one listing (GitHub caps compare at 250
// commits; PR commit listings at 250 as well).
constexpr std::size_t kMaxPages = 1000;

}  // namespace

RepoRef RepoRef::make(std::string_view owner, std::string_view name) {
  if (!valid_segment(owner) || !valid_segment(name)) {
    throw Error(ErrorCode::MalformedUrl,
                "invalid repository " + std::string(owner) + "/" +
                    std::string(name));
  }
  return {std::string(owner), std::string(name)};
}

std::string_view to_string(ResourceKind kind) noexcept {
  switch (kind) {
    case ResourceKind::Compare: return "compare";
    case ResourceKind::PullRequest: return "pull-request";
    case ResourceKind::Issue: return "issue";
  }
  return "unknown";
}

ResourceLocator ResourceLocator::compare(RepoRef repo, std::string spec) {
  const auto dots = spec.find("...");
  if (dots == std::string::npos || dots == 0 || dots + 3 >= spec.size() ||
      std::any_of(spec.begin(), spec.end(),
                  [](unsigned char c) { return std::isspace(c); })) {
    throw Error(ErrorCode::MalformedUrl, "invalid compare spec: " + spec);
  }
  return {ResourceKind::Compare, std::move(repo), std::move(spec), 0};
}

ResourceLocator ResourceLocator::pull_request(RepoRef repo, std::uint64_t number) {
  if (number == 0) throw Error(ErrorCode::MalformedUrl, "pull number must be positive");
  return {ResourceKind::PullRequest, std::move(repo), {}, number};
}

ResourceLocator ResourceLocator::issue(RepoRef repo, std::uint64_t number) {
  if (number == 0) throw Error(ErrorCode::MalformedUrl, "issue number must be positive");
  return {ResourceKind::Issue, std::move(repo), {}, number};
}

ResourceLocator parse_url(std::string_view url) {
  constexpr std::string_view kPrefix = "https://github.com/";
  if (url.substr(0, kPrefix.size()) != kPrefix) {
    malformed(url, "expected an https://github.com/ URL");
  }
  auto path = url.substr(kPrefix.size());
  path = path.substr(0, path.find_first_of("?#"));
  if (!path.empty() && path.back() == '/') path.remove_suffix(1);

  const auto segments = split_path(path);
  if (segments.size() < 4) malformed(url, "unrecognized path");
  if (!valid_segment(segments[0]) || !valid_segment(segments[1])) {
    malformed(url, "invalid owner or repository");
  }
  auto repo = RepoRef::make(segments[0], segments[1]);
  const auto section = segments[2];

  if (section == "compare") {
    // The spec may itself contain '/' (e.g. "main...user/branch").
    const auto offset = segments[0].size() + segments[1].size() + 10;
    auto spec = path.substr(offset);
    if (spec.empty()) malformed(url, "empty compare spec");
    return ResourceLocator::compare(std::move(repo), std::string(spec));
  }
  if (segments.size() != 4) malformed(url, "unrecognized path");
  const auto number = parse_number(segments[3]);
  if (!number) malformed(url, "expected a positive number");
  if (section == "pull") return ResourceLocator::pull_request(std::move(repo), *number);
  if (section == "issues") return ResourceLocator::issue(std::move(repo), *number);
  malformed(url, "unrecognized path");
}

std::string to_web_url(const ResourceLocator& locator) {
  std::string out = "https://github.com/" + locator.repo().full_name();
  switch (locator.kind()) {
    case ResourceKind::Compare: return out + "/compare/" + locator.compare_spec();
    case ResourceKind::PullRequest:
      return out + "/pull/" + std::to_string(locator.number());
    case ResourceKind::Issue:
      return out + "/issues/" + std::to_string(locator.number());
  }
  return out;
}

std::string to_api_url(const ResourceLocator& locator, std::string_view api_origin) {
  auto out = repo_base(locator.repo(), api_origin);
  switch (locator.kind()) {
    case ResourceKind::Compare: return out + "/compare/" + locator.compare_spec();
    case ResourceKind::PullRequest:
      return out + "/pulls/" + std::to_string(locator.number());
    case ResourceKind::Issue:
      return out + "/issues/" + std::to_string(locator.number());
  }
  return out;
}

ApiCredentials ApiCredentials::from_env() {
  ApiCredentials creds;
  if (const char* token = std::getenv("GITHUB_TOKEN"); token && *token) {
    creds.token = token;
  }
  return creds;
}

std::vector<std::uint64_t> linked_issue_numbers(std::string_view body) {
  static const std::regex pattern(
      R"(\b(close[sd]?|fix(e[sd])?|resolve[sd]?)\s+#(\d+))",
      std::regex::icase | std::regex::ECMAScript);
  std::vector<std::uint64_t> out;
  const std::string text(body);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern);
       it != std::sregex_iterator(); ++it) {
    if (auto n = parse_number((*it)[3].str());
        n && std::find(out.begin(), out.end(), *n) == out.end()) {
      out.push_back(*n);
    }
  }
  return out;
}

Client::Client(ApiCredentials credentials, std::string api_origin,
               std::shared_ptr<const http::Transport> transport, RetryPolicy retry)
    : api_origin_(origin_without_slash(std::move(api_origin))),
      transport_(std::move(transport)),
      retry_(retry) {
  if (!transport_) transport_ = std::make_shared<http::HttplibTransport>();
  headers_ = {{"Accept", "application/vnd.github+json"},
              {"User-Agent", "prtitle"}};
  if (credentials.token) {
    headers_.emplace_back("Authorization", "Bearer " + *credentials.token);
  }
}

http::Response Client::get(const std::string& url) const {
  for (int attempt = 0;; ++attempt) {
    const bool may_retry = attempt < retry_.retries;
    try {
      spdlog::debug("GET {}", url);
      auto res = transport_->get(url, headers_);
      if (res.status >= 500 && may_retry) {
        spdlog::warn("HTTP {} from {}, retrying", res.status, url);
        std::this_thread::sleep_for(retry_.backoff);
        continue;
      }
      check_status(res, url);
      return res;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Network || !may_retry) throw;
      spdlog::warn("network error on {}, retrying", url);
      std::this_thread::sleep_for(retry_.backoff);
    }
  }
}

std::vector<CommitRecord> Client::fetch_compare_commits(
    const ResourceLocator& locator) const {
  if (locator.kind() != ResourceKind::Compare) {
    throw Error(ErrorCode::MalformedUrl, "not a compare locator");
  }
  const auto url = to_api_url(locator, api_origin_);
  std::vector<CommitRecord> commits;
  for (std::size_t page = 1; page <= kMaxPages; ++page) {
    const auto page_url = paged(url, page);
    const auto res = get(page_url);
    const auto doc = decode_json(res, page_url);
    if (!doc.is_object()) decode_error(page_url, "expected an object");
    auto list = doc.find("commits");
    if (list == doc.end() || !list->is_array()) {
      decode_error(page_url, "commits array missing");
    }
    for (const auto& item : *list) commits.push_back(decode_commit(item, page_url));

    std::optional<std::size_t> total;
    if (auto t = doc.find("total_commits"); t != doc.end() && t->is_number_unsigned()) {
      total = t->get<std::size_t>();
    }
    if (list->size() < kPageSize || (total && commits.size() >= *total) ||
        !link_has_next(res)) {
      break;
    }
  }
  return commits;
}

IssueRecord Client::fetch_issue(const ResourceLocator& locator) const {
  if (locator.kind() != ResourceKind::Issue) {
    throw Error(ErrorCode::MalformedUrl, "not an issue locator");
  }
  const auto url = to_api_url(locator, api_origin_);
  const auto doc = decode_json(get(url), url);
  if (!doc.is_object()) decode_error(url, "expected an object");
  IssueRecord issue;
  issue.number = decode_positive(doc, "number", url);
  auto title = doc.find("title");
  if (title == doc.end() || !title->is_string()) decode_error(url, "title missing");
  issue.title = trim_copy(title->get<std::string>());
  return issue;
}

std::vector<CommitRecord> Client::fetch_pull_commits(const RepoRef& repo,
                                                     std::uint64_t number) const {
  const auto url =
      repo_base(repo, api_origin_) + "/pulls/" + std::to_string(number) + "/commits";
  std::vector<CommitRecord> commits;
  for (std::size_t page = 1; page <= kMaxPages; ++page) {
    const auto page_url = paged(url, page);
    const auto res = get(page_url);
    const auto doc = decode_json(res, page_url);
    if (!doc.is_array()) decode_error(page_url, "expected a commit array");
    for (const auto& item : doc) commits.push_back(decode_commit(item, page_url));
    if (doc.size() < kPageSize || !link_has_next(res)) break;
  }
  return commits;
}

PullRequestDetails Client::fetch_pull_request(const ResourceLocator& locator) const {
  if (locator.kind() != ResourceKind::PullRequest) {
    throw Error(ErrorCode::MalformedUrl, "not a pull-request locator");
  }
  const auto url = to_api_url(locator, api_origin_);
  const auto doc = decode_json(get(url), url);
  if (!doc.is_object()) decode_error(url, "expected an object");
  PullRequestDetails details;
  details.description = optional_text(doc, "body", url);
  if (details.description) {
    details.linked_issue_numbers = linked_issue_numbers(*details.description);
  }
  details.commits = fetch_pull_commits(locator.repo(), locator.number());
  return details;
}

void Client::list_pulls(const RepoRef& repo,
                        const std::function<bool(const PullSummary&)>& visit) const {
  const auto url = repo_base(repo, api_origin_) +
                   "/pulls?state=all&sort=created&direction=asc";
  for (std::size_t page = 1; page <= kMaxPages; ++page) {
    const auto page_url = paged(url, page);
    const auto res = get(page_url);
    const auto doc = decode_json(res, page_url);
    if (!doc.is_array()) decode_error(page_url, "expected a pull-request array");
    for (const auto& item : doc) {
      if (!item.is_object()) decode_error(page_url, "pull entry is not an object");
      PullSummary pr;
      pr.number = decode_positive(item, "number", page_url);
      auto title = item.find("title");
      if (title == item.end() || !title->is_string()) {
        decode_error(page_url, "pull title missing");
      }
      pr.title = title->get<std::string>();
      pr.body = optional_text(item, "body", page_url);
      if (auto user = item.find("user"); user != item.end() && user->is_object()) {
        if (auto login = user->find("login"); login != user->end() && login->is_string()) {
          pr.author = login->get<std::string>();
        }
      }
      auto created = item.find("created_at");
      if (created == item.end() || !created->is_string()) {
        decode_error(page_url, "created_at missing");
      }
      auto ts = parse_iso8601(created->get<std::string>());
      if (!ts) decode_error(page_url, "created_at malformed");
      pr.created_at = *ts;
      if (!visit(pr)) return;
    }
    if (doc.size() < kPageSize || !link_has_next(res)) break;
  }
}

}  // namespace prtitle::github
