#include "prtitle/service.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>

namespace prtitle::service {
namespace {

using nlohmann::json;

std::shared_ptr<const http::Transport> default_transport(const ServiceConfig& config) {
  auto base = std::make_shared<http::HttplibTransport>(config.request_timeout);
  if (config.cache_ttl.count() <= 0) return base;
  return std::make_shared<http::CachingTransport>(std::move(base), config.cache_ttl);
}

HttpResult error_result(const Error& e) {
  HttpResult result;
  result.status = status_for(e.code());
  result.body = error_body(e.code(), e.what());
  result.retry_after = e.retry_after();
  return result;
}

}  // namespace

void ServiceConfig::validate() const {
  if (port < 1 || port > 65535) {
    throw Error(ErrorCode::InvalidRequest, "port must be in 1..65535");
  }
  if (request_timeout.count() <= 0) {
    throw Error(ErrorCode::InvalidRequest, "request timeout must be positive");
  }
  if (max_source_tokens == 0) {
    throw Error(ErrorCode::InvalidRequest, "max source tokens must be positive");
  }
  backend_spec.validate();
}

int status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedUrl:
    case ErrorCode::MissingPrUrl:
    case ErrorCode::InvalidRequest: return 400;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::EmptySource: return 422;
    case ErrorCode::RateLimited: return 429;
    case ErrorCode::BackendUnavailable:
    case ErrorCode::BackendError:
    case ErrorCode::Upstream:
    case ErrorCode::Network:
    case ErrorCode::DecodeError: return 502;
    case ErrorCode::EmptyCorpus:
    case ErrorCode::EmptySplit:
    case ErrorCode::Io: return 500;
  }
  return 500;
}

std::string error_body(ErrorCode code, std::string_view detail) {
  return json{{"error", to_string(code)}, {"detail", detail}}.dump();
}

assembly::GenerationRequest parse_generation_request(std::string_view body) {
  const auto doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::InvalidRequest, "request body must be a JSON object");
  }
  assembly::GenerationRequest request;
  auto pr = doc.find("pr_url");
  if (pr == doc.end() || pr->is_null() ||
      (pr->is_string() && assembly::trim(pr->get<std::string>()).empty())) {
    throw Error(ErrorCode::MissingPrUrl, "pr_url is required");
  }
  if (!pr->is_string()) throw Error(ErrorCode::InvalidRequest, "pr_url must be text");
  request.pr_url = assembly::trim(pr->get<std::string>());

  if (auto issues = doc.find("issue_urls"); issues != doc.end() && !issues->is_null()) {
    if (!issues->is_array()) {
      throw Error(ErrorCode::InvalidRequest, "issue_urls must be a list");
    }
    for (const auto& u : *issues) {
      if (!u.is_string()) throw Error(ErrorCode::InvalidRequest, "issue_urls must hold text");
      if (auto url = assembly::trim(u.get<std::string>()); !url.empty()) {
        request.issue_urls.push_back(std::move(url));
      }
    }
  }
  if (auto desc = doc.find("description"); desc != doc.end() && !desc->is_null()) {
    if (!desc->is_string()) {
      throw Error(ErrorCode::InvalidRequest, "description must be text");
    }
    if (!assembly::trim(desc->get<std::string>()).empty()) {
      request.description = desc->get<std::string>();
    }
  }
  return request;
}

std::string to_json(const GenerateResponse& response) {
  json parts = json::array();
  for (const auto& p : response.source.parts) {
    parts.push_back({{"kind", assembly::to_string(p.kind)}, {"content", p.content}});
  }
  return json{{"title", response.title},
              {"source_sequence", response.source.text},
              {"parts", std::move(parts)},
              {"warnings", response.warnings},
              {"backend_id", response.backend_id},
              {"elapsed_ms", response.elapsed.count()}}
      .dump();
}

GenerateService::GenerateService(ServiceConfig config,
                                 std::shared_ptr<const summarizer::Backend> backend,
                                 std::shared_ptr<const http::Transport> transport)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      client_(github::ApiCredentials{config_.token}, config_.github_base,
              transport ? std::move(transport) : default_transport(config_),
              config_.retry) {
  if (!backend_) backend_ = summarizer::make_backend(config_.backend_spec);
}

GenerateResponse GenerateService::generate(
    const assembly::GenerationRequest& request) const {
  const auto start = std::chrono::steady_clock::now();
  GenerateResponse response;

  const auto pr = github::parse_url(request.pr_url);
  if (pr.kind() == github::ResourceKind::Issue) {
    throw Error(ErrorCode::MalformedUrl,
                "pr_url must be a compare or pull request URL: " + request.pr_url);
  }

  // Validate every issue URL before any network traffic.
  std::vector<github::ResourceLocator> issues;
  std::set<std::string> seen;
  for (const auto& url : request.issue_urls) {
    auto locator = github::parse_url(url);
    if (locator.kind() != github::ResourceKind::Issue) {
      throw Error(ErrorCode::MalformedUrl, "not an issue URL: " + url);
    }
    if (!seen.insert(github::to_web_url(locator)).second) continue;
    issues.push_back(std::move(locator));
  }
  if (issues.size() > config_.max_issue_urls) {
    response.warnings.push_back("only the first " + std::to_string(config_.max_issue_urls) +
                                " issue URLs were used");
    issues.erase(issues.begin() + static_cast<std::ptrdiff_t>(config_.max_issue_urls),
                 issues.end());
  }

  std::optional<std::string> description = request.description;
  std::vector<github::CommitRecord> commits;
  if (pr.kind() == github::ResourceKind::Compare) {
    commits = client_.fetch_compare_commits(pr);
  } else {
    auto details = client_.fetch_pull_request(pr);
    commits = std::move(details.commits);
    if (!description) description = std::move(details.description);
  }

  std::vector<std::string> issue_titles;
  for (const auto& issue : issues) {
    try {
      issue_titles.push_back(client_.fetch_issue(issue).title);
    } catch (const Error& e) {
      response.warnings.push_back("issue " + github::to_web_url(issue) + " skipped (" +
                                  std::string(to_string(e.code())) + ")");
      spdlog::warn("issue fetch failed: {}", e.what());
    }
  }

  auto seq = assembly::build_source_sequence(
      description, assembly::extract_commit_subjects(commits), issue_titles);
  if (seq.token_count > config_.max_source_tokens) {
    response.warnings.push_back("source sequence truncated to " +
                                std::to_string(config_.max_source_tokens) + " tokens");
    seq = assembly::truncate_to_budget(seq, config_.max_source_tokens);
  }

  auto suggestion = summarizer::generate_title(seq, *backend_);
  response.title = std::move(suggestion.title);
  response.backend_id = std::move(suggestion.backend_id);
  response.source = std::move(seq);
  response.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  return response;
}

HttpResult GenerateService::handle_generate(std::string_view body) const {
  try {
    const auto request = parse_generation_request(body);
    return {200, to_json(generate(request)), std::nullopt};
  } catch (const Error& e) {
    spdlog::info("generate failed: {} ({})", to_string(e.code()), e.what());
    return error_result(e);
  } catch (const std::exception& e) {
    spdlog::error("generate crashed: {}", e.what());
    return {500, json{{"error", "Internal"}, {"detail", "internal error"}}.dump(),
            std::nullopt};
  }
}

HttpResult GenerateService::handle_health() const {
  json body = {{"status", "ok"}, {"backend", backend_->id()}};
  if (const auto* remote = dynamic_cast<const summarizer::RemoteBackend*>(backend_.get())) {
    body["backend_reachable"] = remote->reachable(std::chrono::milliseconds{1000});
  } else {
    body["backend_reachable"] = true;
  }
  return {200, body.dump(), std::nullopt};
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const GenerateService& service) : impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;
  auto reply = [](httplib::Response& res, const HttpResult& result) {
    res.status = result.status;
    if (result.retry_after) {
      res.set_header("Retry-After", std::to_string(result.retry_after->count()));
    }
    res.set_content(result.body, "application/json; charset=utf-8");
  };
  server.Post("/api/generate", [&service, reply](const httplib::Request& req,
                                                 httplib::Response& res) {
    reply(res, service.handle_generate(req.body));
  });
  server.Get("/healthz", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.handle_health());
  });
  if (const auto& dir = service.config().static_dir) {
    if (!server.set_mount_point("/", dir->string())) {
      spdlog::warn("static directory {} not found; UI disabled", dir->string());
    }
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace prtitle::service
