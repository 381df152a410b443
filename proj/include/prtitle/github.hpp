#pragma once

// GitHub URL classification, REST URL rewriting and the read-only API client.

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prtitle/http.hpp"
#include "prtitle/timestamp.hpp"

namespace prtitle::github {

inline constexpr std::string_view kDefaultApiOrigin = "https://api.github.com";
inline constexpr std::size_t kPageSize = 100;

struct RepoRef {
  std::string owner;
  std::string name;

  /// Throws Error(MalformedUrl) if either part is empty or holds '/' or
  /// whitespace.
  static RepoRef make(std::string_view owner, std::string_view name);

  std::string full_name() const { return owner + "/" + name; }

  friend auto operator<=>(const RepoRef&, const RepoRef&) = default;
  friend bool operator==(const RepoRef&, const RepoRef&) = default;
};

enum class ResourceKind { Compare, PullRequest, Issue };

std::string_view to_string(ResourceKind kind) noexcept;

/// A classified github.com URL. Construction goes through the factories, so
/// a Compare locator always has a spec and the others always have a number.
class ResourceLocator {
 public:
  static ResourceLocator compare(RepoRef repo, std::string spec);
  static ResourceLocator pull_request(RepoRef repo, std::uint64_t number);
  static ResourceLocator issue(RepoRef repo, std::uint64_t number);

  ResourceKind kind() const noexcept { return kind_; }
  const RepoRef& repo() const noexcept { return repo_; }
  /// Empty unless kind() == Compare.
  const std::string& compare_spec() const noexcept { return compare_spec_; }
  /// Zero when kind() == Compare.
  std::uint64_t number() const noexcept { return number_; }

  friend bool operator==(const ResourceLocator&, const ResourceLocator&) = default;

 private:
  ResourceLocator(ResourceKind kind, RepoRef repo, std::string spec,
                  std::uint64_t number)
      : kind_(kind), repo_(std::move(repo)), compare_spec_(std::move(spec)),
        number_(number) {}

  ResourceKind kind_;
  RepoRef repo_;
  std::string compare_spec_;
  std::uint64_t number_;
};

/// Classifies https://github.com/{owner}/{repo}/{compare/<spec>|pull/<n>|issues/<n>}.
/// A trailing slash, query or fragment is ignored. Throws Error(MalformedUrl).
ResourceLocator parse_url(std::string_view url);

/// Canonical github.com form of a locator; parse_url(to_web_url(x)) == x.
std::string to_web_url(const ResourceLocator& locator);

/// github.com -> api.github.com/repos rewrite. Pull requests map to the
/// REST "pulls" collection rather than the web "pull" path.
std::string to_api_url(const ResourceLocator& locator,
                       std::string_view api_origin = kDefaultApiOrigin);

struct CommitRecord {
  std::string sha;
  std::string message;

  friend bool operator==(const CommitRecord&, const CommitRecord&) = default;
};

struct IssueRecord {
  std::uint64_t number = 0;
  std::string title;

  friend bool operator==(const IssueRecord&, const IssueRecord&) = default;
};

struct ApiCredentials {
  std::optional<std::string> token;

  /// Reads GITHUB_TOKEN; an empty value counts as absent.
  static ApiCredentials from_env();
};

struct PullRequestDetails {
  std::optional<std::string> description;
  std::vector<CommitRecord> commits;
  std::vector<std::uint64_t> linked_issue_numbers;
};

/// One entry of a repository's pull-request listing.
struct PullSummary {
  std::uint64_t number = 0;
  std::string title;
  std::optional<std::string> body;
  std::string author;
  Timestamp created_at;
};

/// Issue numbers referenced with a closing keyword (close/fix/resolve and
/// their inflections, case-insensitive) in order of first appearance.
std::vector<std::uint64_t> linked_issue_numbers(std::string_view body);

struct RetryPolicy {
  int retries = 1;
  std::chrono::milliseconds backoff{1000};
};

/// Read-only GitHub REST v3 client. Immutable after construction; every
/// method is safe to call concurrently.
///
/// All fetches throw Error with one of NotFound, RateLimited, Upstream,
/// Network or DecodeError. Network failures and 5xx responses are retried
/// according to RetryPolicy; rate limiting is never retried.
class Client {
 public:
  explicit Client(ApiCredentials credentials,
                  std::string api_origin = std::string(kDefaultApiOrigin),
                  std::shared_ptr<const http::Transport> transport = nullptr,
                  RetryPolicy retry = {});

  const std::string& api_origin() const noexcept { return api_origin_; }

  std::vector<CommitRecord> fetch_compare_commits(
      const ResourceLocator& locator) const;

  IssueRecord fetch_issue(const ResourceLocator& locator) const;

  PullRequestDetails fetch_pull_request(const ResourceLocator& locator) const;

  std::vector<CommitRecord> fetch_pull_commits(const RepoRef& repo,
                                               std::uint64_t number) const;

  /// Walks the repository's pull requests oldest first, one page at a time.
  /// Stops when `visit` returns false or the listing is exhausted.
  void list_pulls(const RepoRef& repo,
                  const std::function<bool(const PullSummary&)>& visit) const;

 private:
  http::Response get(const std::string& url) const;

  std::string api_origin_;
  http::Headers headers_;
  std::shared_ptr<const http::Transport> transport_;
  RetryPolicy retry_;
};

}  // namespace prtitle::github
