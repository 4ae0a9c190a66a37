#include "findebate/gateway.hpp"

#include <cctype>
#include <cmath>
#include <thread>

#include "findebate/error.hpp"
#include "findebate/hashing.hpp"

namespace findebate {

void GenerationParams::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::kInvalidConfig, "temperature must be in [0, 2]");
  }
  if (max_output_tokens <= 0) throw Error(ErrorCode::kInvalidConfig, "max_output_tokens must be positive");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "top_p must be in (0, 1]");
  if (!(frequency_penalty >= -2.0 && frequency_penalty <= 2.0)) {
    throw Error(ErrorCode::kInvalidConfig, "frequency_penalty must be in [-2, 2]");
  }
}

// ---------------------------------------------------------------------------
// OfflineEmbedder

OfflineEmbedder::OfflineEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidConfig, "embedding dim must be positive");
}

std::string OfflineEmbedder::model_id() const { return "offline-hash-" + std::to_string(dim_); }

EmbeddingVector OfflineEmbedder::embed_one(const std::string& text) const {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));

  std::vector<double> counts(dim_, 0.0);
  if (tokens.empty()) {
    counts[fnv1a64(text) % dim_] = 1.0;
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    counts[fnv1a64(tokens[i]) % dim_] += 1.0;
    if (i + 1 < tokens.size()) counts[fnv1a64(tokens[i] + " " + tokens[i + 1]) % dim_] += 1.0;
  }
  double norm = 0.0;
  for (double v : counts) norm += v * v;
  norm = std::sqrt(norm);

  EmbeddingVector out;
  out.model_id = model_id();
  out.values.reserve(dim_);
  for (double v : counts) out.values.push_back(static_cast<float>(v / norm));
  return out;
}

std::vector<EmbeddingVector> OfflineEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

// ---------------------------------------------------------------------------
// ModelGateway

class ModelGateway::Slot {
 public:
  explicit Slot(ModelGateway& gw) : gw_(gw) {
    std::unique_lock lock(gw_.mu_);
    gw_.cv_.wait(lock, [&] { return gw_.inflight_ < gw_.options_.max_inflight; });
    ++gw_.inflight_;
  }
  ~Slot() {
    {
      std::lock_guard lock(gw_.mu_);
      --gw_.inflight_;
    }
    gw_.cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  ModelGateway& gw_;
};

ModelGateway::ModelGateway(std::shared_ptr<ChatBackend> chat, std::shared_ptr<EmbeddingBackend> embedder,
                           GatewayOptions options)
    : chat_(std::move(chat)), embedder_(std::move(embedder)), options_(std::move(options)) {
  if (options_.max_inflight == 0) throw Error(ErrorCode::kInvalidConfig, "max_inflight must be positive");
  if (options_.max_embed_batch == 0) throw Error(ErrorCode::kInvalidConfig, "max_embed_batch must be positive");
  if (options_.retry.max_attempts < 1) throw Error(ErrorCode::kInvalidConfig, "retry attempts must be >= 1");
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

template <typename Fn>
auto ModelGateway::with_retry(Fn&& fn, int* attempts_out) {
  auto backoff = options_.retry.initial_backoff;
  std::string last_error;
  for (int attempt = 1;; ++attempt) {
    if (attempts_out) *attempts_out = attempt;
    try {
      Slot slot(*this);
      return fn();
    } catch (const TransientError& e) {
      last_error = e.what();
    }
    if (attempt >= options_.retry.max_attempts) break;
    options_.sleep(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<std::chrono::milliseconds::rep>(static_cast<double>(backoff.count()) * options_.retry.multiplier));
  }
  {
    std::lock_guard lock(mu_);
    ++stats_.failed_calls;
  }
  throw Error(ErrorCode::kBackendUnavailable, "gave up after " + std::to_string(options_.retry.max_attempts) +
                                                  " attempts: " + last_error);
}

ChatResult ModelGateway::chat_detailed(const ChatRequest& request) {
  if (!chat_) throw Error(ErrorCode::kBackendUnavailable, "no chat backend configured");
  if (request.system_prompt.empty() || request.user_prompt.empty()) {
    throw Error(ErrorCode::kPreconditionViolation, "chat request needs non-empty system and user prompts");
  }
  {
    std::lock_guard lock(mu_);
    ++stats_.chat_calls;
  }
  int attempts = 0;
  Completion completion = with_retry([&] { return chat_->complete(request); }, &attempts);
  {
    std::lock_guard lock(mu_);
    stats_.chat_attempts += static_cast<std::size_t>(attempts);
    if (completion.truncated) ++stats_.truncated_responses;
  }
  bool blank = true;
  for (char c : completion.text) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      blank = false;
      break;
    }
  }
  if (blank) {
    std::lock_guard lock(mu_);
    ++stats_.failed_calls;
    throw Error(ErrorCode::kResponseEmpty, "blank completion for role " + request.role_tag);
  }
  return ChatResult{std::move(completion.text), completion.truncated, attempts, chat_->model_id()};
}

std::string ModelGateway::chat(const ChatRequest& request) { return chat_detailed(request).text; }

std::vector<EmbeddingVector> ModelGateway::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) return {};
  if (!embedder_) throw Error(ErrorCode::kBackendUnavailable, "no embedding backend configured");
  if (texts.size() > options_.max_embed_batch) {
    throw Error(ErrorCode::kBatchTooLarge, std::to_string(texts.size()) + " texts exceed batch limit " +
                                               std::to_string(options_.max_embed_batch));
  }
  for (const auto& t : texts) {
    if (t.empty()) throw Error(ErrorCode::kPreconditionViolation, "cannot embed an empty text");
  }
  auto vectors = with_retry([&] { return embedder_->embed(texts); }, nullptr);
  if (vectors.size() != texts.size()) {
    throw Error(ErrorCode::kBackendUnavailable, "embedding backend returned " + std::to_string(vectors.size()) +
                                                    " vectors for " + std::to_string(texts.size()) + " texts");
  }
  for (const auto& v : vectors) {
    if (v.dim() == 0 || v.dim() != vectors.front().dim() || v.model_id != vectors.front().model_id) {
      throw Error(ErrorCode::kBackendUnavailable, "embedding backend returned inconsistent vectors");
    }
    for (float x : v.values) {
      if (!std::isfinite(x)) throw Error(ErrorCode::kBackendUnavailable, "embedding contains non-finite values");
    }
  }
  std::lock_guard lock(mu_);
  ++stats_.embed_calls;
  stats_.embedded_texts += texts.size();
  return vectors;
}

std::vector<EmbeddingVector> ModelGateway::embed_all(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); i += options_.max_embed_batch) {
    const auto last = std::min(texts.size(), i + options_.max_embed_batch);
    auto part = embed(std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(i),
                                               texts.begin() + static_cast<std::ptrdiff_t>(last)));
    for (auto& v : part) out.push_back(std::move(v));
  }
  return out;
}

GatewayStats ModelGateway::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

std::string ModelGateway::chat_model_id() const { return chat_ ? chat_->model_id() : std::string(); }
std::string ModelGateway::embed_model_id() const { return embedder_ ? embedder_->model_id() : std::string(); }

}  // namespace findebate
