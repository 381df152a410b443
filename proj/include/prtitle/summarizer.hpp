#pragma once

// Title generation backends. Every backend maps a SourceSequence to a
// single-line title of at most max_title_tokens tokens.

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "prtitle/assembly.hpp"

namespace prtitle::summarizer {

enum class BackendId { Extractive, Remote };

std::string_view to_string(BackendId id) noexcept;
std::optional<BackendId> parse_backend_id(std::string_view text);

struct BackendSpec {
  BackendId id = BackendId::Extractive;
  std::optional<std::string> remote_endpoint;
  std::size_t max_title_tokens = 12;
  std::chrono::milliseconds timeout{30000};

  /// Throws Error(InvalidRequest) when Remote lacks an endpoint or
  /// max_title_tokens is zero.
  void validate() const;
};

struct TitleSuggestion {
  std::string title;
  std::string backend_id;
  std::chrono::milliseconds elapsed{0};
};

/// Collapses whitespace runs to one space, trims, and strips trailing
/// '.', ';', ':' and ',' characters.
std::string normalize_title(std::string_view raw);

/// Token-prefix of `raw` (at most max_tokens tokens), then normalize_title.
std::string finish_title(std::string_view raw, std::size_t max_tokens);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  /// Returns a finished title (see finish_title). Never returns empty text.
  virtual std::string generate(const assembly::SourceSequence& seq) const = 0;
};

/// Picks the part whose distinct tokens have the highest summed frequency
/// over the whole sequence; ties go to the earlier part.
class ExtractiveBackend final : public Backend {
 public:
  explicit ExtractiveBackend(std::size_t max_title_tokens = 12)
      : max_title_tokens_(max_title_tokens) {}

  std::string id() const override { return "extractive"; }
  std::string generate(const assembly::SourceSequence& seq) const override;

 private:
  std::size_t max_title_tokens_;
};

/// POSTs {"source", "max_length"} to a model server and reads {"title"}.
class RemoteBackend final : public Backend {
 public:
  RemoteBackend(std::string endpoint, std::size_t max_title_tokens,
                std::chrono::milliseconds timeout);

  std::string id() const override { return "remote"; }
  std::string generate(const assembly::SourceSequence& seq) const override;

  /// True if anything answers HTTP at the endpoint.
  bool reachable(std::chrono::milliseconds timeout) const;

  const std::string& endpoint() const noexcept { return endpoint_; }

 private:
  std::string endpoint_;
  std::size_t max_title_tokens_;
  std::chrono::milliseconds timeout_;
};

/// Index of the winning part; throws Error(EmptySource) if no part has a token.
std::size_t extractive_choice(const assembly::SourceSequence& seq);

std::string extractive_generate(const assembly::SourceSequence& seq,
                                std::size_t max_title_tokens);

std::string remote_generate(const assembly::SourceSequence& seq,
                            const std::string& endpoint,
                            std::size_t max_title_tokens,
                            std::chrono::milliseconds timeout);

std::unique_ptr<Backend> make_backend(const BackendSpec& spec);

TitleSuggestion generate_title(const assembly::SourceSequence& seq,
                               const Backend& backend);

TitleSuggestion generate_title(const assembly::SourceSequence& seq,
                               const BackendSpec& spec);

}  // namespace prtitle::summarizer
