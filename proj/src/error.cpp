#include "prtitle/error.hpp"

namespace prtitle {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedUrl: return "MalformedUrl";
    case ErrorCode::MissingPrUrl: return "MissingPrUrl";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::Upstream: return "Upstream";
    case ErrorCode::Network: return "Network";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::EmptySource: return "EmptySource";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::BackendError: return "BackendError";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace prtitle
