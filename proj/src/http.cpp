#include "prtitle/http.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <charconv>

#include "prtitle/error.hpp"

namespace prtitle::http {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

Response convert(const httplib::Response& res) {
  Response out;
  out.status = res.status;
  out.body = res.body;
  for (const auto& [name, value] : res.headers) {
    out.headers.emplace(lower(name), value);
  }
  return out;
}

httplib::Client make_client(const Url& url, std::chrono::milliseconds timeout) {
  httplib::Client client(url.origin());
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

httplib::Headers to_httplib(const Headers& headers) {
  httplib::Headers out;
  for (const auto& [k, v] : headers) out.emplace(k, v);
  return out;
}

}  // namespace

std::optional<std::string> Response::header(std::string_view name) const {
  auto it = headers.find(lower(std::string(name)));
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

std::string Url::origin() const {
  const bool default_port =
      (scheme == "http" && port == 80) || (scheme == "https" && port == 443);
  std::string out = scheme + "://" + host;
  if (!default_port) out += ":" + std::to_string(port);
  return out;
}

std::optional<Url> parse_url(std::string_view url) {
  Url out;
  const auto sep = url.find("://");
  if (sep == std::string_view::npos) return std::nullopt;
  out.scheme = lower(std::string(url.substr(0, sep)));
  if (out.scheme != "http" && out.scheme != "https") return std::nullopt;
  auto rest = url.substr(sep + 3);
  const auto slash = rest.find_first_of("/?#");
  auto authority = rest.substr(0, slash);
  out.target = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (out.target.front() != '/') out.target.insert(out.target.begin(), '/');
  if (authority.empty() || authority.find('@') != std::string_view::npos) {
    return std::nullopt;
  }
  out.port = out.scheme == "https" ? 443 : 80;
  if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    const auto port_text = authority.substr(colon + 1);
    int port = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(),
                                     port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() ||
        port < 1 || port > 65535) {
      return std::nullopt;
    }
    out.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) return std::nullopt;
  out.host = std::string(authority);
  return out;
}

Response HttplibTransport::get(const std::string& url,
                               const Headers& headers) const {
  const auto parsed = parse_url(url);
  if (!parsed) throw Error(ErrorCode::Network, "unsupported URL: " + url);
  auto client = make_client(*parsed, timeout_);
  auto res = client.Get(parsed->target, to_httplib(headers));
  if (!res) {
    throw Error(ErrorCode::Network,
                "GET " + url + " failed: " + httplib::to_string(res.error()));
  }
  return convert(*res);
}

Response HttplibTransport::post(const std::string& url, const std::string& body,
                                const std::string& content_type,
                                const Headers& headers) const {
  const auto parsed = parse_url(url);
  if (!parsed) throw Error(ErrorCode::Network, "unsupported URL: " + url);
  auto client = make_client(*parsed, timeout_);
  auto res = client.Post(parsed->target, to_httplib(headers), body, content_type);
  if (!res) {
    throw Error(ErrorCode::Network,
                "POST " + url + " failed: " + httplib::to_string(res.error()));
  }
  return convert(*res);
}

CachingTransport::CachingTransport(std::shared_ptr<const Transport> inner,
                                   std::chrono::milliseconds ttl)
    : inner_(std::move(inner)), ttl_(ttl) {}

Response CachingTransport::get(const std::string& url,
                               const Headers& headers) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(url); it != entries_.end()) {
      if (Clock::now() - it->second.stored < ttl_) return it->second.response;
      entries_.erase(it);
    }
  }
  auto response = inner_->get(url, headers);
  if (response.status >= 200 && response.status < 300 && ttl_.count() > 0) {
    std::lock_guard lock(mutex_);
    entries_.insert_or_assign(url, Entry{Clock::now(), response});
  }
  return response;
}

std::size_t CachingTransport::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace prtitle::http
