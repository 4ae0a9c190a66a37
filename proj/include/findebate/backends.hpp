#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "findebate/gateway.hpp"

namespace findebate {

/// Deterministic chat backend keyed by ChatRequest::role_tag.
///
/// Default replies:
///   analyst roles        "MOCK-ANALYSIS role=<tag>" plus the chunk ids the prompt offers
///   report_synthesizer,
///   zero_shot,
///   standard_rag         a fixed three-horizon report (LONG 78% / LONG 74% / NEUTRAL 70%)
///   trust/skeptic/leader the report between the <<<REPORT markers with one section
///                        appended, stance untouched
///   judge_*              "Score: N", N in 1..4 derived from the prompt
/// Every reply carries a digest of the prompt so different inputs give
/// different text. Replies can be overridden per role for tests.
class MockChatBackend final : public ChatBackend {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;

  explicit MockChatBackend(std::uint64_t seed = 0, std::string model_id = "mock-chat");

  Completion complete(const ChatRequest& request) override;
  std::string model_id() const override { return model_id_; }

  void set_reply(const std::string& role_tag, std::string text);
  /// "*" matches every role without a more specific entry.
  void set_responder(const std::string& role_tag, Responder fn);
  /// The next `times` calls for the role throw TransientError; negative means always.
  void fail_role(const std::string& role_tag, int times = -1);

  std::vector<ChatRequest> requests() const;
  std::size_t call_count() const;

  /// The reply used when no override applies.
  std::string default_reply(const ChatRequest& request) const;

 private:
  std::uint64_t seed_;
  std::string model_id_;
  mutable std::mutex mu_;
  std::map<std::string, Responder> responders_;
  std::map<std::string, int> failures_;
  std::vector<ChatRequest> requests_;
};

/// The fixed report emitted by the mock synthesizer, with its digest line.
std::string mock_report_text(const std::string& digest_line);

struct HttpEndpoint {
  std::string base_url;  // e.g. "https://api.openai.com/v1"
  std::string model;
  std::string api_key;   // sent as a bearer token when non-empty
  int timeout_seconds = 120;
};

/// OpenAI-compatible POST {base_url}/chat/completions. 429, 5xx and transport
/// errors raise TransientError; other failures raise Error(kBackendUnavailable).
class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpEndpoint endpoint);
  Completion complete(const ChatRequest& request) override;
  std::string model_id() const override { return endpoint_.model; }

 private:
  HttpEndpoint endpoint_;
};

/// OpenAI-compatible POST {base_url}/embeddings.
class HttpEmbeddingBackend final : public EmbeddingBackend {
 public:
  explicit HttpEmbeddingBackend(HttpEndpoint endpoint);
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
  std::string model_id() const override { return endpoint_.model; }

 private:
  HttpEndpoint endpoint_;
};

/// Reads FINDEBATE_API_KEY; empty when unset.
std::string api_key_from_env();

}  // namespace findebate
