#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "prtitle/assembly.hpp"
#include "prtitle/error.hpp"
#include "prtitle/rouge.hpp"

namespace {

using namespace prtitle::assembly;
using prtitle::github::CommitRecord;

std::vector<CommitRecord> commits(std::initializer_list<const char*> messages) {
  std::vector<CommitRecord> out;
  for (const char* m : messages) out.push_back({std::string(40, 'a'), m});
  return out;
}

TEST(ExtractCommitSubjects, FirstLineOnly) {
  EXPECT_EQ(extract_commit_subjects(commits({"Fix leak\n\nDetails here"})),
            std::vector<std::string>{"Fix leak"});
}

TEST(ExtractCommitSubjects, DropsMergesAndBlanks) {
  EXPECT_EQ(extract_commit_subjects(commits({"Merge branch 'main' into dev", "Add cache"})),
            std::vector<std::string>{"Add cache"});
  EXPECT_EQ(extract_commit_subjects(commits({"Merge pull request #3 from a/b",
                                             "Merge remote-tracking branch 'origin/x'",
                                             "", "\n\nbody only", "  Merged things  "})),
            std::vector<std::string>{"Merged things"});
  EXPECT_TRUE(extract_commit_subjects({}).empty());
}

TEST(BuildSourceSequence, OrdersDescriptionCommitsIssues) {
  const auto seq = build_source_sequence("Fixes #145340", {"Fix inactive notebook view"},
                                         {"Inactive view for Jupyter notebook"});
  EXPECT_EQ(seq.text,
            "Fixes #145340\nFix inactive notebook view\nInactive view for Jupyter notebook");
  ASSERT_EQ(seq.parts.size(), 3u);
  EXPECT_EQ(seq.parts[0].kind, PartKind::Description);
  EXPECT_EQ(seq.parts[1].kind, PartKind::Commit);
  EXPECT_EQ(seq.parts[2].kind, PartKind::IssueTitle);
  EXPECT_EQ(seq.token_count, prtitle::rouge::count_tokens(seq.text));
}

TEST(BuildSourceSequence, SinglePartAndTrimming) {
  const auto seq = build_source_sequence(std::nullopt, {"  Add cache \n"}, {});
  EXPECT_EQ(seq.text, "Add cache");
  EXPECT_EQ(seq.parts.size(), 1u);
  EXPECT_EQ(seq.token_count, 2u);
}

TEST(BuildSourceSequence, EmptySource) {
  try {
    build_source_sequence(std::nullopt, {}, {});
    FAIL();
  } catch (const prtitle::Error& e) {
    EXPECT_EQ(e.code(), prtitle::ErrorCode::EmptySource);
  }
  EXPECT_THROW(build_source_sequence("  \n", {" "}, {"\t"}), prtitle::Error);
}

TEST(BuildSourceSequence, IssuePermutationOnlyPermutesIssueParts) {
  std::vector<std::string> issues{"Alpha issue", "Beta issue", "Gamma issue"};
  const auto base = build_source_sequence("desc", {"c1", "c2"}, issues);
  std::mt19937 rng(5);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(issues.begin(), issues.end(), rng);
    const auto seq = build_source_sequence("desc", {"c1", "c2"}, issues);
    ASSERT_EQ(seq.parts.size(), base.parts.size());
    for (std::size_t k = 0; k < 3; ++k) ASSERT_EQ(seq.parts[k], base.parts[k]);
    for (std::size_t k = 0; k < issues.size(); ++k) {
      ASSERT_EQ(seq.parts[3 + k].content, issues[k]);
    }
  }
}

TEST(BuildSourceSequence, PartsAreSubstrings) {
  const std::vector<std::string> subjects{"Fix a", "Fix b", "Refactor c"};
  const std::vector<std::string> titles{"Crash on start", "Typo"};
  const auto seq = build_source_sequence("Long description\nwith lines", subjects, titles);
  for (const auto& s : subjects) EXPECT_NE(seq.text.find(s), std::string::npos);
  for (const auto& t : titles) EXPECT_NE(seq.text.find(t), std::string::npos);
}

SourceSequence parts_of(std::initializer_list<std::string> contents) {
  std::vector<Part> parts;
  for (const auto& c : contents) parts.push_back({PartKind::Commit, c});
  return from_parts(std::move(parts));
}

TEST(TruncateToBudget, UnderBudgetUnchanged) {
  const auto seq = parts_of({"one two three four five", "six seven eight nine ten"});
  ASSERT_EQ(seq.token_count, 10u);
  EXPECT_EQ(truncate_to_budget(seq, 50), seq);
}

TEST(TruncateToBudget, CutsThirdPart) {
  const auto seq = parts_of({"a1 a2 a3 a4", "b1 b2 b3 b4", "c1 c2 c3 c4"});
  const auto cut = truncate_to_budget(seq, 9);
  EXPECT_EQ(cut.token_count, 9u);
  ASSERT_EQ(cut.parts.size(), 3u);
  EXPECT_EQ(cut.parts[2].content, "c1");
  EXPECT_EQ(cut.text, "a1 a2 a3 a4\nb1 b2 b3 b4\nc1");
}

TEST(TruncateToBudget, CutsFirstPart) {
  std::string twenty;
  for (int i = 1; i <= 20; ++i) twenty += (i > 1 ? " w" : "w") + std::to_string(i);
  const auto cut = truncate_to_budget(parts_of({twenty}), 5);
  EXPECT_EQ(cut.text, "w1 w2 w3 w4 w5");
  EXPECT_EQ(cut.token_count, 5u);
}

TEST(TruncateToBudget, KeepsOriginalSpacingAndCase) {
  const auto cut = truncate_to_budget(parts_of({"Fix:  The PARSER, now!"}), 2);
  EXPECT_EQ(cut.text, "Fix:  The");
}

TEST(TruncateToBudget, IdempotentAndMonotone) {
  std::mt19937 rng(9);
  const std::vector<std::string> words{"fix", "add", "the", "parser", "cache", "!!", "v2"};
  for (int i = 0; i < 300; ++i) {
    std::vector<Part> parts;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int p = 0; p < n; ++p) {
      std::string content;
      const int len = 1 + static_cast<int>(rng() % 8);
      for (int w = 0; w < len; ++w) content += (w ? " " : "") + words[rng() % words.size()];
      parts.push_back({static_cast<PartKind>(rng() % 3), content});
    }
    const auto seq = from_parts(parts);
    const std::size_t budget = 1 + rng() % 20;
    const auto once = truncate_to_budget(seq, budget);
    ASSERT_LE(once.token_count, budget);
    ASSERT_LE(once.token_count, seq.token_count);
    ASSERT_EQ(truncate_to_budget(once, budget), once);
    ASSERT_FALSE(once.parts.empty());
    ASSERT_EQ(seq.text.rfind(once.text, 0), 0u);  // result is a prefix of the input
    if (seq.token_count >= budget) {
      ASSERT_EQ(once.token_count, budget);
    }
  }
}

}  // namespace
