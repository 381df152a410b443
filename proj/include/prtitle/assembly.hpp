#pragma once

// Builds the generation input: description, then commit subjects, then issue
// titles, one part per line.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prtitle/github.hpp"

namespace prtitle::assembly {

inline constexpr char kSeparator = '\n';
inline constexpr std::size_t kDefaultMaxTokens = 1024;

struct GenerationRequest {
  std::string pr_url;
  std::vector<std::string> issue_urls;
  std::optional<std::string> description;
};

enum class PartKind { Description, Commit, IssueTitle };

std::string_view to_string(PartKind kind) noexcept;

struct Part {
  PartKind kind;
  std::string content;

  friend bool operator==(const Part&, const Part&) = default;
};

struct SourceSequence {
  std::string text;
  std::vector<Part> parts;
  std::size_t token_count = 0;

  friend bool operator==(const SourceSequence&, const SourceSequence&) = default;
};

std::string trim(std::string_view text);

/// True for subjects git generates when merging ("Merge branch ...",
/// "Merge pull request ...", "Merge remote-tracking branch ...").
bool is_merge_subject(std::string_view subject);

/// First line of each message, trimmed; empty and merge subjects dropped.
std::vector<std::string> extract_commit_subjects(
    const std::vector<github::CommitRecord>& commits);

/// Throws Error(EmptySource) if every input is empty after trimming.
SourceSequence build_source_sequence(const std::optional<std::string>& description,
                                     const std::vector<std::string>& commit_subjects,
                                     const std::vector<std::string>& issue_titles);

/// Re-derives text and token_count from parts.
SourceSequence from_parts(std::vector<Part> parts);

/// Keeps whole parts while they fit, then cuts the first part that does not
/// at a token boundary so the result holds exactly `max_tokens` tokens.
SourceSequence truncate_to_budget(const SourceSequence& seq, std::size_t max_tokens);

}  // namespace prtitle::assembly
