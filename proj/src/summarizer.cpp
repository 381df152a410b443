#include "prtitle/summarizer.hpp"

#include <spdlog/spdlog.h>

#include <cctype>
#include <nlohmann/json.hpp>
#include <set>
#include <unordered_map>

#include "prtitle/error.hpp"
#include "prtitle/http.hpp"
#include "prtitle/rouge.hpp"

namespace prtitle::summarizer {

std::string_view to_string(BackendId id) noexcept {
  return id == BackendId::Extractive ? "extractive" : "remote";
}

std::optional<BackendId> parse_backend_id(std::string_view text) {
  if (text == "extractive") return BackendId::Extractive;
  if (text == "remote") return BackendId::Remote;
  return std::nullopt;
}

void BackendSpec::validate() const {
  if (max_title_tokens == 0) {
    throw Error(ErrorCode::InvalidRequest, "max_title_tokens must be at least 1");
  }
  if (id == BackendId::Remote && (!remote_endpoint || remote_endpoint->empty())) {
    throw Error(ErrorCode::InvalidRequest, "remote backend requires an endpoint");
  }
  if (timeout.count() <= 0) {
    throw Error(ErrorCode::InvalidRequest, "timeout must be positive");
  }
}

std::string normalize_title(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  while (!out.empty()) {
    const char last = out.back();
    if (last == '.' || last == ';' || last == ':' || last == ',' || last == ' ') {
      out.pop_back();
    } else {
      break;
    }
  }
  return out;
}

std::string finish_title(std::string_view raw, std::size_t max_tokens) {
  return normalize_title(rouge::token_prefix(raw, max_tokens));
}

std::size_t extractive_choice(const assembly::SourceSequence& seq) {
  std::vector<rouge::TokenSequence> tokens;
  tokens.reserve(seq.parts.size());
  std::unordered_map<std::string, std::size_t> frequency;
  for (const auto& part : seq.parts) {
    tokens.push_back(rouge::tokenize(part.content));
    for (const auto& t : tokens.back()) ++frequency[t];
  }

  std::optional<std::size_t> best;
  std::size_t best_score = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty()) continue;
    const std::set<std::string> distinct(tokens[i].begin(), tokens[i].end());
    std::size_t score = 0;
    for (const auto& t : distinct) score += frequency.at(t);
    if (!best || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  if (!best) throw Error(ErrorCode::EmptySource, "source sequence has no tokens");
  return *best;
}

std::string extractive_generate(const assembly::SourceSequence& seq,
                                std::size_t max_title_tokens) {
  const auto& winner = seq.parts.at(extractive_choice(seq)).content;
  auto title = finish_title(winner, max_title_tokens);
  // Only trailing punctuation can be stripped, and the winner has a token.
  if (title.empty()) throw Error(ErrorCode::EmptySource, "no usable title text");
  return title;
}

std::string ExtractiveBackend::generate(const assembly::SourceSequence& seq) const {
  return extractive_generate(seq, max_title_tokens_);
}

std::string remote_generate(const assembly::SourceSequence& seq,
                            const std::string& endpoint,
                            std::size_t max_title_tokens,
                            std::chrono::milliseconds timeout) {
  const nlohmann::json body = {{"source", seq.text},
                               {"max_length", max_title_tokens}};
  http::HttplibTransport transport(timeout);
  http::Response res;
  try {
    res = transport.post(endpoint, body.dump(), "application/json");
  } catch (const Error& e) {
    throw Error(ErrorCode::BackendUnavailable, e.what());
  }
  if (res.status != 200) {
    throw Error(ErrorCode::BackendError,
                "model server answered HTTP " + std::to_string(res.status));
  }
  const auto doc = nlohmann::json::parse(res.body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::BackendError, "model server sent invalid JSON");
  }
  auto title = doc.find("title");
  if (title == doc.end() || !title->is_string()) {
    throw Error(ErrorCode::BackendError, "model server response lacks a title");
  }
  auto finished = finish_title(title->get<std::string>(), max_title_tokens);
  if (finished.empty()) {
    throw Error(ErrorCode::BackendError, "model server returned an empty title");
  }
  return finished;
}

RemoteBackend::RemoteBackend(std::string endpoint, std::size_t max_title_tokens,
                             std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)),
      max_title_tokens_(max_title_tokens),
      timeout_(timeout) {}

std::string RemoteBackend::generate(const assembly::SourceSequence& seq) const {
  return remote_generate(seq, endpoint_, max_title_tokens_, timeout_);
}

bool RemoteBackend::reachable(std::chrono::milliseconds timeout) const {
  try {
    http::HttplibTransport(timeout).get(endpoint_, {});
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::unique_ptr<Backend> make_backend(const BackendSpec& spec) {
  spec.validate();
  if (spec.id == BackendId::Remote) {
    return std::make_unique<RemoteBackend>(*spec.remote_endpoint,
                                           spec.max_title_tokens, spec.timeout);
  }
  return std::make_unique<ExtractiveBackend>(spec.max_title_tokens);
}

TitleSuggestion generate_title(const assembly::SourceSequence& seq,
                               const Backend& backend) {
  if (seq.parts.empty()) throw Error(ErrorCode::EmptySource, "empty source sequence");
  const auto start = std::chrono::steady_clock::now();
  TitleSuggestion out;
  out.title = backend.generate(seq);
  out.backend_id = backend.id();
  out.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  spdlog::debug("{} backend produced a title in {} ms", out.backend_id,
                out.elapsed.count());
  return out;
}

TitleSuggestion generate_title(const assembly::SourceSequence& seq,
                               const BackendSpec& spec) {
  return generate_title(seq, *make_backend(spec));
}

}  // namespace prtitle::summarizer
