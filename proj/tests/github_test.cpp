#include <gtest/gtest.h>

#include <random>

#include "prtitle/error.hpp"
#include "prtitle/github.hpp"
#include "support/mock_github.hpp"

namespace {

using namespace prtitle::github;
using prtitle::Error;
using prtitle::ErrorCode;
using prtitle::testing::commit_json;
using prtitle::testing::MockServer;
using prtitle::testing::Reply;

template <class F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no prtitle::Error thrown";
  return ErrorCode::Io;
}

TEST(ParseUrl, CompareUrlFromVscode) {
  const auto loc = parse_url(
      "https://github.com/microsoft/vscode/compare/main...TylerLeonhardt/copy-after-action");
  EXPECT_EQ(loc.kind(), ResourceKind::Compare);
  EXPECT_EQ(loc.repo(), (RepoRef{"microsoft", "vscode"}));
  EXPECT_EQ(loc.compare_spec(), "main...TylerLeonhardt/copy-after-action");
}

TEST(ParseUrl, PullRequestUrl) {
  const auto loc = parse_url("https://github.com/microsoft/vscode/pull/146125");
  EXPECT_EQ(loc.kind(), ResourceKind::PullRequest);
  EXPECT_EQ(loc.number(), 146125u);
}

TEST(ParseUrl, IssueUrlWithTrailingSlashAndQuery) {
  const auto loc = parse_url("https://github.com/octo/demo/issues/123/?foo=1#frag");
  EXPECT_EQ(loc.kind(), ResourceKind::Issue);
  EXPECT_EQ(loc.number(), 123u);
}

TEST(ParseUrl, RejectsMalformed) {
  for (const char* bad : {
           "https://gitlab.com/a/b/issues/1",
           "http://github.com/a/b/issues/1",
           "https://api.github.com/repos/a/b/issues/1",
           "https://github.com/a/b/issues/x1",
           "https://github.com/a/b/issues/0",
           "https://github.com/a/b/issues/-3",
           "https://github.com/a/b/pull/",
           "https://github.com/a/b/compare/",
           "https://github.com/a/b/compare/main",
           "https://github.com/a/b/compare/main..dev",
           "https://github.com/a/b/tree/main",
           "https://github.com/a/b",
           "https://github.com//b/issues/1",
           "https://github.com/a/b/issues/1/comments",
           "github.com/a/b/issues/1",
           "",
       }) {
    EXPECT_EQ(error_code_of([&] { parse_url(bad); }), ErrorCode::MalformedUrl) << bad;
  }
}

TEST(ToApiUrl, CompareRewrite) {
  const auto loc = parse_url(
      "https://github.com/microsoft/vscode/compare/main...TylerLeonhardt/copy-after-action");
  EXPECT_EQ(to_api_url(loc),
            "https://api.github.com/repos/microsoft/vscode/compare/"
            "main...TylerLeonhardt/copy-after-action");
}

TEST(ToApiUrl, IssueAndPull) {
  const auto repo = RepoRef::make("octo", "demo");
  EXPECT_EQ(to_api_url(ResourceLocator::issue(repo, 123)),
            "https://api.github.com/repos/octo/demo/issues/123");
  EXPECT_EQ(to_api_url(ResourceLocator::pull_request(repo, 7)),
            "https://api.github.com/repos/octo/demo/pulls/7");
  EXPECT_EQ(to_api_url(ResourceLocator::issue(repo, 1), "http://127.0.0.1:9/"),
            "http://127.0.0.1:9/repos/octo/demo/issues/1");
}

std::string random_word(std::mt19937& rng) {
  static const std::string chars = "abcdefghijklmnopqrstuvwxyz0123456789-_.";
  std::uniform_int_distribution<std::size_t> len(1, 12), pick(0, chars.size() - 1);
  std::string w(len(rng), 'x');
  for (auto& c : w) c = chars[pick(rng)];
  return w;
}

ResourceLocator random_locator(std::mt19937& rng) {
  auto repo = RepoRef::make(random_word(rng), random_word(rng));
  std::uniform_int_distribution<std::uint64_t> num(1, 999999);
  switch (rng() % 3) {
    case 0:
      return ResourceLocator::compare(repo, random_word(rng) + "..." + random_word(rng) +
                                                "/" + random_word(rng));
    case 1: return ResourceLocator::pull_request(repo, num(rng));
    default: return ResourceLocator::issue(repo, num(rng));
  }
}

TEST(LocatorProperties, RoundTripAndApiShape) {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto loc = random_locator(rng);
    const auto web = to_web_url(loc);
    ASSERT_EQ(parse_url(web), loc) << web;
    const auto api = to_api_url(loc);
    ASSERT_EQ(api.rfind("https://api.github.com/repos/", 0), 0u);
    const std::string suffix =
        loc.kind() == ResourceKind::Compare ? loc.compare_spec()
        : loc.kind() == ResourceKind::Issue ? "/issues/" + std::to_string(loc.number())
                                            : "/pulls/" + std::to_string(loc.number());
    ASSERT_TRUE(api.ends_with(suffix)) << api;
  }
}

TEST(LocatorProperties, RejectsEveryOtherHost) {
  std::mt19937 rng(11);
  const std::vector<std::string> hosts = {"gitlab.com",   "github.co",  "api.github.com",
                                          "GITHUB.COM",   "github.com.evil.org",
                                          "www.github.com", "githu.com", "github.comx"};
  for (int i = 0; i < 300; ++i) {
    const auto web = to_web_url(random_locator(rng));
    const auto path = web.substr(std::string("https://github.com").size());
    for (const auto& host : hosts) {
      ASSERT_EQ(error_code_of([&] { parse_url("https://" + host + path); }),
                ErrorCode::MalformedUrl);
    }
  }
}

TEST(LinkedIssues, ClosingKeywords) {
  EXPECT_EQ(linked_issue_numbers("Fixes #145340"), (std::vector<std::uint64_t>{145340}));
  EXPECT_EQ(linked_issue_numbers("closes #1, RESOLVED #2 and fix #1; see #9"),
            (std::vector<std::uint64_t>{1, 2}));
  EXPECT_TRUE(linked_issue_numbers("refs #4, prefixes #5").empty());
}

class ClientTest : public ::testing::Test {
 protected:
  MockServer server;
  Client client{ApiCredentials{"sekrit-token"}, server.origin(), nullptr,
                RetryPolicy{1, std::chrono::milliseconds{1}}};
  RepoRef repo = RepoRef::make("octo", "demo");
  ResourceLocator compare = ResourceLocator::compare(repo, "main...feature");
};

TEST_F(ClientTest, CompareCommitsInOrder) {
  server.on_get("/repos/octo/demo/compare/main...feature",
                Reply::json({{"total_commits", 3},
                             {"commits",
                              {commit_json(1, "one"), commit_json(2, "two\n\nbody"),
                               commit_json(3, "three")}}}));
  const auto commits = client.fetch_compare_commits(compare);
  ASSERT_EQ(commits.size(), 3u);
  EXPECT_EQ(commits[0].message, "one");
  EXPECT_EQ(commits[1].message, "two\n\nbody");
  EXPECT_EQ(commits[2].sha, prtitle::testing::fake_sha(3));

  const auto seen = server.requests();
  ASSERT_FALSE(seen.empty());
  EXPECT_EQ(seen[0].authorization, "Bearer sekrit-token");
  EXPECT_EQ(seen[0].accept, "application/vnd.github+json");
  EXPECT_EQ(seen[0].params.at("per_page"), "100");
}

TEST_F(ClientTest, IdenticalBranchesGiveNoCommits) {
  server.on_get("/repos/octo/demo/compare/main...feature",
                Reply::json({{"total_commits", 0}, {"commits", nlohmann::json::array()}}));
  EXPECT_TRUE(client.fetch_compare_commits(compare).empty());
}

TEST_F(ClientTest, ComparePaginatesToExhaustion) {
  nlohmann::json all = nlohmann::json::array();
  for (unsigned i = 1; i <= 230; ++i) all.push_back(commit_json(i, "c" + std::to_string(i)));
  server.on_get("/repos/octo/demo/compare/main...feature", [all](const httplib::Request& req) {
    return Reply::json({{"total_commits", all.size()},
                        {"commits", prtitle::testing::page_of(all, req)}});
  });
  const auto commits = client.fetch_compare_commits(compare);
  ASSERT_EQ(commits.size(), 230u);
  EXPECT_EQ(commits.back().message, "c230");
  EXPECT_EQ(server.hits("/repos/octo/demo/compare/main...feature"), 3u);
}

TEST_F(ClientTest, StatusMapping) {
  const auto path = "/repos/octo/demo/compare/main...feature";
  server.on_get(path, Reply{404, R"({"message":"Not Found"})", {}});
  EXPECT_EQ(error_code_of([&] { client.fetch_compare_commits(compare); }), ErrorCode::NotFound);

  server.on_get(path, Reply{403, "{}", {{"Retry-After", "42"}}});
  try {
    client.fetch_compare_commits(compare);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RateLimited);
    ASSERT_TRUE(e.retry_after());
    EXPECT_EQ(e.retry_after()->count(), 42);
  }
  server.on_get(path, Reply{429, "{}", {}});
  EXPECT_EQ(error_code_of([&] { client.fetch_compare_commits(compare); }),
            ErrorCode::RateLimited);

  server.on_get(path, Reply::json({{"status", "ahead"}}));
  EXPECT_EQ(error_code_of([&] { client.fetch_compare_commits(compare); }),
            ErrorCode::DecodeError);
}

TEST_F(ClientTest, RateLimitIsNotRetried) {
  const auto path = "/repos/octo/demo/compare/main...feature";
  server.on_get(path, Reply{429, "{}", {}});
  EXPECT_EQ(error_code_of([&] { client.fetch_compare_commits(compare); }),
            ErrorCode::RateLimited);
  EXPECT_EQ(server.hits(path), 1u);
}

TEST_F(ClientTest, ServerErrorRetriedOnce) {
  const auto path = "/repos/octo/demo/issues/5";
  server.on_get(path, Reply{503, "{}", {}});
  EXPECT_EQ(error_code_of([&] { client.fetch_issue(ResourceLocator::issue(repo, 5)); }),
            ErrorCode::Upstream);
  EXPECT_EQ(server.hits(path), 2u);

  auto calls = std::make_shared<std::atomic<int>>(0);
  server.on_get(path, [calls](const httplib::Request&) {
    return ++*calls == 1 ? Reply{500, "{}", {}}
                         : Reply::json({{"number", 5}, {"title", "Flaky"}});
  });
  EXPECT_EQ(client.fetch_issue(ResourceLocator::issue(repo, 5)).title, "Flaky");
}

TEST_F(ClientTest, NetworkErrorAfterRetry) {
  const Client dead(ApiCredentials{}, "http://127.0.0.1:1", nullptr,
                    RetryPolicy{1, std::chrono::milliseconds{1}});
  EXPECT_EQ(error_code_of([&] { dead.fetch_issue(ResourceLocator::issue(repo, 1)); }),
            ErrorCode::Network);
}

TEST_F(ClientTest, FetchIssue) {
  server.on_get("/repos/octo/demo/issues/145340",
                Reply::json({{"number", 145340},
                             {"title", "  Inactive view for Jupyter notebook \n"}}));
  const auto issue = client.fetch_issue(ResourceLocator::issue(repo, 145340));
  EXPECT_EQ(issue.number, 145340u);
  EXPECT_EQ(issue.title, "Inactive view for Jupyter notebook");

  EXPECT_EQ(error_code_of([&] { client.fetch_issue(ResourceLocator::issue(repo, 9)); }),
            ErrorCode::NotFound);
  server.on_get("/repos/octo/demo/issues/10", Reply::json({{"number", 10}}));
  EXPECT_EQ(error_code_of([&] { client.fetch_issue(ResourceLocator::issue(repo, 10)); }),
            ErrorCode::DecodeError);
}

TEST_F(ClientTest, FetchPullRequest) {
  server.on_get("/repos/octo/demo/pulls/3",
                Reply::json({{"number", 3}, {"body", "Fixes #145340"}}));
  server.on_get("/repos/octo/demo/pulls/3/commits",
                Reply::json({commit_json(1, "Fix view"), commit_json(2, "Tidy")}));
  const auto pr = client.fetch_pull_request(ResourceLocator::pull_request(repo, 3));
  ASSERT_TRUE(pr.description);
  EXPECT_EQ(*pr.description, "Fixes #145340");
  EXPECT_EQ(pr.commits.size(), 2u);
  EXPECT_EQ(pr.linked_issue_numbers, (std::vector<std::uint64_t>{145340}));

  server.on_get("/repos/octo/demo/pulls/4", Reply::json({{"number", 4}, {"body", nullptr}}));
  server.on_get("/repos/octo/demo/pulls/4/commits", Reply::json(nlohmann::json::array({commit_json(1, "x")})));
  const auto bare = client.fetch_pull_request(ResourceLocator::pull_request(repo, 4));
  EXPECT_FALSE(bare.description);
  EXPECT_TRUE(bare.linked_issue_numbers.empty());

  server.on_get("/repos/octo/demo/pulls/5", Reply{429, "{}", {{"Retry-After", "7"}}});
  try {
    client.fetch_pull_request(ResourceLocator::pull_request(repo, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RateLimited);
    EXPECT_EQ(e.retry_after().value().count(), 7);
  }
}

TEST_F(ClientTest, ArbitraryPayloadsDecodeOrFailCleanly) {
  const std::vector<std::string> payloads = {
      "", "null", "[]", "{}", "42", "\"text\"", "{\"commits\": {}}",
      "{\"commits\": [1, 2]}", "{\"commits\": [{\"sha\": \"abc\"}]}",
      "{\"commits\": [{\"sha\": \"" + std::string(40, 'a') + "\", \"commit\": {}}]}",
      "{\"commits\": [{\"sha\": \"" + std::string(40, 'A') +
          "\", \"commit\": {\"message\": \"m\"}}]}",
      "{\"number\": -1, \"title\": \"x\"}", "{\"number\": \"1\", \"title\": \"x\"}",
      "{\"number\": 1, \"title\": 5}", "{not json", "[[[[[[[[[[]]]]]]]]]]",
  };
  std::mt19937 rng(3);
  std::vector<std::string> all = payloads;
  for (int i = 0; i < 200; ++i) {
    std::string noise(rng() % 40, ' ');
    for (auto& c : noise) c = "{}[]\":,0123 abcnulltrue"[rng() % 23];
    all.push_back(noise);
  }
  for (const auto& body : all) {
    server.on_get("/repos/octo/demo/compare/main...feature", Reply{200, body, {}});
    server.on_get("/repos/octo/demo/issues/1", Reply{200, body, {}});
    server.on_get("/repos/octo/demo/pulls/1", Reply{200, body, {}});
    server.on_get("/repos/octo/demo/pulls/1/commits", Reply{200, body, {}});
    for (auto call : std::vector<std::function<void()>>{
             [&] { client.fetch_compare_commits(compare); },
             [&] { client.fetch_issue(ResourceLocator::issue(repo, 1)); },
             [&] { client.fetch_pull_request(ResourceLocator::pull_request(repo, 1)); }}) {
      try {
        call();
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::DecodeError) << body;
      }
    }
  }
}

TEST_F(ClientTest, ListPullsWalksPagesOldestFirst) {
  nlohmann::json all = nlohmann::json::array();
  for (int i = 1; i <= 150; ++i) {
    all.push_back({{"number", i},
                   {"title", "PR " + std::to_string(i)},
                   {"body", nullptr},
                   {"user", {{"login", "dev"}}},
                   {"created_at", "2021-03-04T05:06:07Z"}});
  }
  server.on_get("/repos/octo/demo/pulls", [all](const httplib::Request& req) {
    EXPECT_EQ(req.get_param_value("direction"), "asc");
    return Reply::json(prtitle::testing::page_of(all, req));
  });
  std::vector<std::uint64_t> numbers;
  client.list_pulls(repo, [&](const PullSummary& pr) {
    numbers.push_back(pr.number);
    return pr.number < 120;
  });
  ASSERT_EQ(numbers.size(), 120u);
  EXPECT_EQ(numbers.back(), 120u);
}

TEST(CachingTransport, ServesRepeatsFromMemory) {
  MockServer server;
  server.on_get("/x", Reply::json({{"v", 1}}));
  auto inner = std::make_shared<prtitle::http::HttplibTransport>();
  prtitle::http::CachingTransport cache(inner, std::chrono::milliseconds{60000});
  EXPECT_EQ(cache.get(server.origin() + "/x", {}).status, 200);
  EXPECT_EQ(cache.get(server.origin() + "/x", {}).status, 200);
  EXPECT_EQ(server.hits("/x"), 1u);

  prtitle::http::CachingTransport expired(inner, std::chrono::milliseconds{0});
  expired.get(server.origin() + "/x", {});
  expired.get(server.origin() + "/x", {});
  EXPECT_EQ(server.hits("/x"), 3u);
}

}  // namespace
