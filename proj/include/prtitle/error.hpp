#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace prtitle {

/// Closed set of failure codes shared by the library, the CLI and the HTTP
/// service. The string form (see to_string) is what appears in error bodies.
enum class ErrorCode {
  MalformedUrl,
  MissingPrUrl,
  InvalidRequest,
  NotFound,
  RateLimited,
  Upstream,
  Network,
  DecodeError,
  EmptySource,
  BackendUnavailable,
  BackendError,
  EmptyCorpus,
  EmptySplit,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  Error(ErrorCode code, const std::string& detail,
        std::optional<std::chrono::seconds> retry_after)
      : std::runtime_error(detail), code_(code), retry_after_(retry_after) {}

  ErrorCode code() const noexcept { return code_; }

  /// Only set for RateLimited when the upstream sent a hint.
  std::optional<std::chrono::seconds> retry_after() const noexcept {
    return retry_after_;
  }

 private:
  ErrorCode code_;
  std::optional<std::chrono::seconds> retry_after_;
};

}  // namespace prtitle
