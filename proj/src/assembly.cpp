#include "prtitle/assembly.hpp"

#include <regex>

#include "prtitle/error.hpp"
#include "prtitle/rouge.hpp"

namespace prtitle::assembly {

std::string_view to_string(PartKind kind) noexcept {
  switch (kind) {
    case PartKind::Description: return "Description";
    case PartKind::Commit: return "Commit";
    case PartKind::IssueTitle: return "IssueTitle";
  }
  return "Unknown";
}

std::string trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto begin = text.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  const auto end = text.find_last_not_of(ws);
  return std::string(text.substr(begin, end - begin + 1));
}

bool is_merge_subject(std::string_view subject) {
  static const std::regex pattern(
      R"(^Merge (branch|pull request|remote-tracking branch)\b)");
  return std::regex_search(subject.begin(), subject.end(), pattern);
}

std::vector<std::string> extract_commit_subjects(
    const std::vector<github::CommitRecord>& commits) {
  std::vector<std::string> subjects;
  for (const auto& commit : commits) {
    std::string_view message = commit.message;
    auto subject = trim(message.substr(0, message.find('\n')));
    if (subject.empty() || is_merge_subject(subject)) continue;
    subjects.push_back(std::move(subject));
  }
  return subjects;
}

SourceSequence from_parts(std::vector<Part> parts) {
  SourceSequence seq;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) seq.text.push_back(kSeparator);
    seq.text += parts[i].content;
  }
  seq.token_count = rouge::count_tokens(seq.text);
  seq.parts = std::move(parts);
  return seq;
}

SourceSequence build_source_sequence(const std::optional<std::string>& description,
                                     const std::vector<std::string>& commit_subjects,
                                     const std::vector<std::string>& issue_titles) {
  std::vector<Part> parts;
  auto add = [&parts](PartKind kind, std::string_view text) {
    if (auto content = trim(text); !content.empty()) {
      parts.push_back({kind, std::move(content)});
    }
  };
  if (description) add(PartKind::Description, *description);
  for (const auto& s : commit_subjects) add(PartKind::Commit, s);
  for (const auto& t : issue_titles) add(PartKind::IssueTitle, t);
  if (parts.empty()) {
    throw Error(ErrorCode::EmptySource,
                "description, commit messages and issue titles are all empty");
  }
  return from_parts(std::move(parts));
}

SourceSequence truncate_to_budget(const SourceSequence& seq, std::size_t max_tokens) {
  if (seq.token_count <= max_tokens) return seq;
  std::vector<Part> kept;
  std::size_t used = 0;
  for (const auto& part : seq.parts) {
    const auto tokens = rouge::count_tokens(part.content);
    if (used + tokens <= max_tokens) {
      kept.push_back(part);
      used += tokens;
      continue;
    }
    const auto room = max_tokens - used;
    if (room > 0) {
      kept.push_back({part.kind, std::string(rouge::token_prefix(part.content, room))});
    }
    break;
  }
  return from_parts(std::move(kept));
}

}  // namespace prtitle::assembly
