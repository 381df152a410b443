#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "prtitle/cli.hpp"
#include "prtitle/dataset.hpp"
#include "support/mock_github.hpp"

namespace {

using prtitle::testing::MockServer;
using prtitle::testing::Reply;
namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "prtitle");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = prtitle::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  MockServer github;
  fs::path dir = fs::temp_directory_path() / ("prtitle-cli-" + std::to_string(::getpid()));

  void SetUp() override {
    prtitle::testing::install_vscode_fixture(github);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
};

TEST_F(CliTest, NoArgumentsIsUsageError) { EXPECT_EQ(run({}).code, 1); }

TEST_F(CliTest, UnknownBackendIsUsageError) {
  EXPECT_EQ(run({"generate", "--pr-url", "x", "--backend", "gpt"}).code, 1);
  EXPECT_EQ(run({"generate", "--pr-url", "x", "--backend", "remote"}).code, 1);
}

TEST_F(CliTest, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST_F(CliTest, GeneratePrintsTitle) {
  const auto r = run({"generate", "--pr-url", prtitle::testing::kVscodePullUrl, "--issue-url",
                      prtitle::testing::kVscodeIssueUrl, "--github-base", github.origin()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(r.out.empty());
  EXPECT_EQ(r.out.back(), '\n');
}

TEST_F(CliTest, GenerateJson) {
  const auto r = run({"generate", "--pr-url", prtitle::testing::kVscodeCompareUrl,
                      "--github-base", github.origin(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["parts"].size(), 2u);
}

TEST_F(CliTest, GenerateRuntimeErrorExitsTwo) {
  const auto r = run({"generate", "--pr-url", "https://github.com/a/b/pull/1",
                      "--github-base", github.origin()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("NotFound"), std::string::npos);
  EXPECT_EQ(run({"generate", "--pr-url", "ftp://x"}).code, 2);
}

TEST_F(CliTest, DatasetBuildSplitEvaluate) {
  nlohmann::json pulls = nlohmann::json::array();
  for (int n = 1; n <= 12; ++n) {
    pulls.push_back({{"number", n},
                     {"title", "Improve module number " + std::to_string(n)},
                     {"body", nullptr},
                     {"user", {{"login", "dev"}}},
                     {"created_at", "2021-03-0" + std::to_string(1 + n % 9) + "T00:00:00Z"}});
    github.on_get("/repos/acme/tool/pulls/" + std::to_string(n) + "/commits",
                  Reply::json(nlohmann::json::array(
                      {prtitle::testing::commit_json(n, "Improve module number " + std::to_string(n))})));
  }
  std::sort(pulls.begin(), pulls.end(), [](const auto& a, const auto& b) {
    return a["created_at"].template get<std::string>() < b["created_at"].template get<std::string>();
  });
  github.on_get("/repos/acme/tool/pulls", [pulls](const httplib::Request& req) {
    return Reply::json(prtitle::testing::page_of(pulls, req));
  });
  {
    std::ofstream(dir / "a.txt") << "acme/tool most-starred\nacme/gone most-starred\n";
    std::ofstream(dir / "b.txt") << "acme/tool most-forked\n";
  }
  auto r = run({"dataset", "repos", "--segment", (dir / "a.txt").string(), "--segment",
                (dir / "b.txt").string(), "--out", (dir / "repos.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "2 distinct repositories\n");

  const auto corpus = (dir / "corpus.jsonl").string();
  r = run({"dataset", "build", "--repos", (dir / "repos.txt").string(), "--out", corpus,
           "--seed", "7", "--github-base", github.origin(), "--workers", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "12 records: 10 train / 1 val / 1 test\n");
  const auto manifest = prtitle::dataset::read_manifest(dir / "corpus.manifest.json");
  EXPECT_EQ(manifest.seed, 7u);
  ASSERT_EQ(manifest.failed_repos.size(), 1u);
  EXPECT_EQ(manifest.failed_repos[0].repo, "acme/gone");

  r = run({"dataset", "split", "--in", corpus, "--seed", "7", "--out",
           (dir / "again.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(prtitle::dataset::read_manifest(dir / "again.json").test, manifest.test);

  r = run({"evaluate", "--corpus", corpus, "--manifest", (dir / "corpus.manifest.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("extractive |  100.00* |  100.00* |  100.00*"), std::string::npos)
      << r.out;
  EXPECT_TRUE(fs::exists(dir / "corpus.extractive.eval.csv"));
}

TEST_F(CliTest, SplitMissingFileExitsTwo) {
  EXPECT_EQ(run({"dataset", "split", "--in", (dir / "none.jsonl").string(), "--seed", "1"}).code,
            2);
}

}  // namespace
