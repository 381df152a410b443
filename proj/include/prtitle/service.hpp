#pragma once

// HTTP JSON front end: POST /api/generate, GET /healthz and the static UI.

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prtitle/assembly.hpp"
#include "prtitle/error.hpp"
#include "prtitle/github.hpp"
#include "prtitle/http.hpp"
#include "prtitle/summarizer.hpp"

namespace prtitle::service {

struct ServiceConfig {
  int port = 8080;
  summarizer::BackendSpec backend_spec;
  std::string github_base = std::string(github::kDefaultApiOrigin);
  std::optional<std::string> token;
  std::size_t max_issue_urls = 10;
  std::chrono::milliseconds request_timeout{30000};
  std::chrono::milliseconds cache_ttl{60000};
  std::size_t max_source_tokens = assembly::kDefaultMaxTokens;
  github::RetryPolicy retry;
  std::optional<std::filesystem::path> static_dir;

  /// Throws Error(InvalidRequest).
  void validate() const;
};

struct GenerateResponse {
  std::string title;
  assembly::SourceSequence source;
  std::vector<std::string> warnings;
  std::string backend_id;
  std::chrono::milliseconds elapsed{0};
};

struct HttpResult {
  int status = 200;
  std::string body;  // JSON
  std::optional<std::chrono::seconds> retry_after;
};

/// HTTP status used for an error code in responses.
int status_for(ErrorCode code) noexcept;

/// {"error": code, "detail": text}
std::string error_body(ErrorCode code, std::string_view detail);

/// Parses {"pr_url", "issue_urls"?, "description"?}. Throws
/// Error(MissingPrUrl) or Error(InvalidRequest).
assembly::GenerationRequest parse_generation_request(std::string_view body);

std::string to_json(const GenerateResponse& response);

/// Stateless request handler shared by all connections.
class GenerateService {
 public:
  explicit GenerateService(ServiceConfig config,
                           std::shared_ptr<const summarizer::Backend> backend = nullptr,
                           std::shared_ptr<const http::Transport> transport = nullptr);

  /// Runs URL parsing, GitHub fetches, assembly, truncation and generation.
  /// Issue fetch failures become warnings; anything else throws Error.
  GenerateResponse generate(const assembly::GenerationRequest& request) const;

  HttpResult handle_generate(std::string_view body) const;
  HttpResult handle_health() const;

  const ServiceConfig& config() const noexcept { return config_; }

 private:
  ServiceConfig config_;
  std::shared_ptr<const summarizer::Backend> backend_;
  github::Client client_;
};

/// Owns the listening socket. Routes are bound at construction.
class HttpServer {
 public:
  explicit HttpServer(const GenerateService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free port) and returns the bound port,
  /// or -1 on failure.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace prtitle::service
