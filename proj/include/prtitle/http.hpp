#pragma once

// Minimal blocking HTTP client surface used by the GitHub client and the
// remote summarization backend.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace prtitle::http {

using Headers = std::vector<std::pair<std::string, std::string>>;

struct Response {
  int status = 0;
  std::string body;
  /// Header names are lowercased.
  std::map<std::string, std::string> headers;

  std::optional<std::string> header(std::string_view name) const;
};

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string target;  // path plus optional query, always starts with '/'

  std::string origin() const;
};

/// Splits an absolute http(s) URL. Returns nullopt on anything else.
std::optional<Url> parse_url(std::string_view url);

class Transport {
 public:
  virtual ~Transport() = default;

  /// Throws Error(Network) when no HTTP response was obtained.
  virtual Response get(const std::string& url, const Headers& headers) const = 0;
};

class HttplibTransport final : public Transport {
 public:
  explicit HttplibTransport(
      std::chrono::milliseconds timeout = std::chrono::milliseconds{30000})
      : timeout_(timeout) {}

  Response get(const std::string& url, const Headers& headers) const override;

  /// Throws Error(Network) when the connection fails or times out.
  Response post(const std::string& url, const std::string& body,
                const std::string& content_type,
                const Headers& headers = {}) const;

 private:
  std::chrono::milliseconds timeout_;
};

/// Serves repeated GETs of the same URL from memory for `ttl`. Only 2xx
/// responses are cached. Safe for concurrent use.
class CachingTransport final : public Transport {
 public:
  using Clock = std::chrono::steady_clock;

  CachingTransport(std::shared_ptr<const Transport> inner,
                   std::chrono::milliseconds ttl);

  Response get(const std::string& url, const Headers& headers) const override;

  std::size_t size() const;

 private:
  struct Entry {
    Clock::time_point stored;
    Response response;
  };

  std::shared_ptr<const Transport> inner_;
  std::chrono::milliseconds ttl_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, Entry> entries_;
};

}  // namespace prtitle::http
