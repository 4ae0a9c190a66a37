#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace findebate {

struct GenerationParams {
  double temperature = 0.6;
  int max_output_tokens = 6500;
  double top_p = 0.85;
  double frequency_penalty = 0.1;

  void validate() const;
  friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

struct ChatRequest {
  std::string system_prompt;
  std::string user_prompt;
  GenerationParams params;
  std::string role_tag;  // which agent is asking, e.g. "earnings_analyst"
};

struct EmbeddingVector {
  std::vector<float> values;
  std::string model_id;

  std::size_t dim() const noexcept { return values.size(); }
};

struct Completion {
  std::string text;
  bool truncated = false;  // provider stopped at max_output_tokens
};

/// Thrown by backends for failures worth retrying (timeouts, 429, 5xx).
class TransientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual Completion complete(const ChatRequest& request) = 0;
  virtual std::string model_id() const = 0;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
  virtual std::string model_id() const = 0;
};

/// Feature-hashed unigram + bigram counts, L2-normalized. Tokens are maximal
/// runs of ASCII alphanumerics (or non-ASCII bytes), lowercased; bucket is
/// fnv1a64(token) % dim, bigrams hash as "a b". Text without tokens hashes as a
/// single feature so every vector has unit norm.
class OfflineEmbedder final : public EmbeddingBackend {
 public:
  explicit OfflineEmbedder(std::size_t dim = 256);

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
  std::string model_id() const override;

  EmbeddingVector embed_one(const std::string& text) const;

 private:
  std::size_t dim_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
};

struct GatewayOptions {
  RetryPolicy retry;
  std::size_t max_inflight = 4;
  std::size_t max_embed_batch = 64;
  // Replaced in tests to avoid real waits.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct GatewayStats {
  std::size_t chat_calls = 0;
  std::size_t chat_attempts = 0;
  std::size_t embed_calls = 0;
  std::size_t embedded_texts = 0;
  std::size_t truncated_responses = 0;
  std::size_t failed_calls = 0;
};

struct ChatResult {
  std::string text;
  bool truncated = false;
  int attempts = 0;
  std::string model_id;
};

/// Shared front door for every model call. Retries TransientError with
/// exponential backoff, caps concurrent requests at max_inflight and keeps call
/// counters for run manifests. Safe to share between threads.
class ModelGateway {
 public:
  ModelGateway(std::shared_ptr<ChatBackend> chat, std::shared_ptr<EmbeddingBackend> embedder,
               GatewayOptions options = {});

  /// Throws kBackendUnavailable after retries, kResponseEmpty on a blank reply.
  /// Truncated completions are returned but counted in stats().truncated_responses.
  std::string chat(const ChatRequest& request);
  ChatResult chat_detailed(const ChatRequest& request);

  /// One vector per input in input order. Throws kBatchTooLarge when the batch
  /// exceeds max_embed_batch.
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);

  /// embed() over consecutive batches of at most max_embed_batch.
  std::vector<EmbeddingVector> embed_all(const std::vector<std::string>& texts);

  GatewayStats stats() const;
  std::string chat_model_id() const;
  std::string embed_model_id() const;
  const GatewayOptions& options() const noexcept { return options_; }

 private:
  class Slot;

  template <typename Fn>
  auto with_retry(Fn&& fn, int* attempts_out);

  std::shared_ptr<ChatBackend> chat_;
  std::shared_ptr<EmbeddingBackend> embedder_;
  GatewayOptions options_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t inflight_ = 0;
  GatewayStats stats_;
};

}  // namespace findebate
