#include "findebate/backends.hpp"

#include <cstdlib>
#include <regex>
#include <set>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "findebate/error.hpp"
#include "findebate/hashing.hpp"
#include "findebate/report.hpp"

namespace findebate {
namespace {

constexpr std::string_view kStrategyHeading = "## Multi-Timeframe Investment Strategy";

const std::map<std::string, std::string>& analyst_paragraphs() {
  static const std::map<std::string, std::string> kText = {
      {"earnings_analyst",
       "Reported revenue and earnings trends are consistent with management's commentary. Margin "
       "performance reflects pricing actions and cost discipline, and guidance was reaffirmed."},
      {"market_predictor",
       "The immediate reaction should track the earnings surprise and the confident tone of the "
       "prepared remarks. Weekly follow-through depends on estimate revisions."},
      {"sentiment_analyst",
       "Management sounded confident and specific in prepared remarks and answered analyst questions "
       "directly. Caution was limited to labor availability and cost inflation."},
      {"valuation_analyst",
       "Business quality indicators discussed on the call support the current valuation. Upside "
       "depends on sustaining margin improvement through the next quarters."},
      {"risk_analyst",
       "Material risks are labor availability, input cost inflation and the pace of demand recovery. "
       "Management outlined mitigation plans, so the overall risk rating is moderate."},
  };
  return kText;
}

std::string prompt_digest(std::uint64_t seed, const ChatRequest& r) {
  return sha256_hex(std::to_string(seed) + "\n" + r.system_prompt + "\n" + r.user_prompt).substr(0, 16);
}

std::vector<std::string> offered_ids(const std::string& prompt) {
  static const std::regex kId(R"(\[([^\]\s]+#[0-9]{5})\])");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto it = std::sregex_iterator(prompt.begin(), prompt.end(), kId); it != std::sregex_iterator(); ++it) {
    if (seen.insert((*it)[1].str()).second) out.push_back((*it)[1].str());
    if (out.size() == 3) break;
  }
  return out;
}

std::optional<std::string> report_block(const std::string& prompt) {
  const auto open = prompt.find(kReportBlockOpen);
  if (open == std::string::npos) return std::nullopt;
  const auto body = prompt.find('\n', open);
  const auto close = prompt.find(kReportBlockClose, open);
  if (body == std::string::npos || close == std::string::npos || close < body) return std::nullopt;
  std::string text = prompt.substr(body + 1, close - body - 1);
  while (!text.empty() && (text.back() == '\n' || text.back() == ' ')) text.pop_back();
  return text;
}

std::string debate_reply(const std::string& report, const std::string& heading, const std::string& body) {
  const std::string section = "## " + heading + "\n" + body + "\n\n";
  const auto at = report.find(kStrategyHeading);
  if (at == std::string::npos) return report + "\n\n" + section;
  return report.substr(0, at) + section + report.substr(at);
}

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorCode::kInvalidConfig, "base_url needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  ParsedUrl out{url.substr(0, slash), slash == std::string::npos ? "" : url.substr(slash)};
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

nlohmann::json post_json(const HttpEndpoint& ep, const std::string& path, const nlohmann::json& body) {
  const ParsedUrl url = split_url(ep.base_url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(ep.timeout_seconds, 0);
  client.set_read_timeout(ep.timeout_seconds, 0);
  client.set_write_timeout(ep.timeout_seconds, 0);
  httplib::Headers headers;
  if (!ep.api_key.empty()) headers.emplace("Authorization", "Bearer " + ep.api_key);

  auto res = client.Post(url.prefix + path, headers, body.dump(), "application/json");
  if (!res) throw TransientError("transport error: " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500) {
    throw TransientError("HTTP " + std::to_string(res->status) + " from " + path);
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::kBackendUnavailable,
                "HTTP " + std::to_string(res->status) + " from " + path + ": " + res->body.substr(0, 200));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, "malformed JSON from " + path + ": " + e.what());
  }
}

}  // namespace

std::string mock_report_text(const std::string& digest_line) {
  return "# Institutional Investment Report\n"
         "\n" +
         digest_line +
         "\n"
         "\n"
         "## Executive Summary\n"
         "Management delivered results ahead of expectations and reaffirmed full-year guidance. Revenue "
         "growth and margin discipline support a constructive near-term view, while the longer horizon "
         "depends on execution of the stated strategic initiatives.\n"
         "\n"
         "## Financial Performance\n"
         "Revenue and earnings trends discussed on the call point to steady operating momentum. "
         "Management attributed margin improvement to pricing actions and cost efficiency programs.\n"
         "\n"
         "## Risk Assessment\n"
         "Labor availability, input cost inflation and the pace of demand recovery remain the principal "
         "risks. Management described mitigation plans without quantifying their impact.\n"
         "\n"
         "## Multi-Timeframe Investment Strategy\n"
         "\n"
         "### 1-DAY TRADING RECOMMENDATION\n"
         "Position: LONG\n"
         "Conviction: 78%\n"
         "Expected Direction: Upward on the earnings beat and confident management tone.\n"
         "Key Catalyst: Results above expectations with reaffirmed guidance.\n"
         "\n"
         "### 1-WEEK MOMENTUM STRATEGY\n"
         "Position: LONG\n"
         "Conviction: 74%\n"
         "Expected Direction: Gradual follow-through as analysts revise estimates.\n"
         "Momentum Drivers: Guidance reaffirmation and margin commentary.\n"
         "\n"
         "### 1-MONTH FUNDAMENTAL POSITION\n"
         "Position: NEUTRAL\n"
         "Conviction: 70%\n"
         "Expected Direction: Range-bound until execution on strategic initiatives is visible.\n"
         "Fundamental Catalysts: Next quarter's update on demand recovery and cost programs.\n";
}

MockChatBackend::MockChatBackend(std::uint64_t seed, std::string model_id)
    : seed_(seed), model_id_(std::move(model_id)) {}

std::string MockChatBackend::default_reply(const ChatRequest& r) const {
  const std::string digest = prompt_digest(seed_, r);
  const std::string& tag = r.role_tag;

  if (auto it = analyst_paragraphs().find(tag); it != analyst_paragraphs().end()) {
    std::string out = "MOCK-ANALYSIS role=" + tag + "\nPrompt digest: " + digest + "\n";
    const auto ids = offered_ids(r.user_prompt);
    if (!ids.empty()) {
      out += "Cited evidence:";
      for (const auto& id : ids) out += " [" + id + "]";
      out += "\n";
    }
    return out + "\n" + it->second + "\n";
  }
  if (tag == "report_synthesizer" || tag == "zero_shot" || tag == "standard_rag") {
    return mock_report_text("Source digest: " + digest + " (" + tag + ")");
  }
  if (tag == "trust_agent" || tag == "skeptic_agent" || tag == "leader_agent") {
    const std::string report = report_block(r.user_prompt).value_or(mock_report_text("Source digest: " + digest));
    if (tag == "trust_agent") {
      return debate_reply(report, "Evidence Reinforcement",
                          "Management's reaffirmed guidance and the reported margin gains directly support the "
                          "existing recommendations. Review digest: " + digest + ".");
    }
    if (tag == "skeptic_agent") {
      return debate_reply(report, "Risk Considerations",
                          "Labor availability and cost inflation could delay the expected margin path; position "
                          "sizing should reflect that. Review digest: " + digest + ".");
    }
    return debate_reply(report, "Leader Synthesis",
                        "The supporting evidence and the identified risks are consistent with the stated "
                        "positions, which are retained unchanged. Review digest: " + digest + ".");
  }
  if (tag.starts_with("judge")) {
    const int score = 1 + static_cast<int>(fnv1a64(std::to_string(seed_) + tag + r.user_prompt) % 4);
    return "Score: " + std::to_string(score);
  }
  return "MOCK-RESPONSE role=" + tag + "\nPrompt digest: " + digest + "\n";
}

Completion MockChatBackend::complete(const ChatRequest& request) {
  Responder fn;
  {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
    auto fail = failures_.find(request.role_tag);
    if (fail != failures_.end() && fail->second != 0) {
      if (fail->second > 0) --fail->second;
      throw TransientError("mock failure for role " + request.role_tag);
    }
    auto it = responders_.find(request.role_tag);
    if (it == responders_.end()) it = responders_.find("*");
    if (it != responders_.end()) fn = it->second;
  }
  return Completion{fn ? fn(request) : default_reply(request), false};
}

void MockChatBackend::set_reply(const std::string& role_tag, std::string text) {
  set_responder(role_tag, [text = std::move(text)](const ChatRequest&) { return text; });
}

void MockChatBackend::set_responder(const std::string& role_tag, Responder fn) {
  std::lock_guard lock(mu_);
  responders_[role_tag] = std::move(fn);
}

void MockChatBackend::fail_role(const std::string& role_tag, int times) {
  std::lock_guard lock(mu_);
  failures_[role_tag] = times;
}

std::vector<ChatRequest> MockChatBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t MockChatBackend::call_count() const {
  std::lock_guard lock(mu_);
  return requests_.size();
}

HttpChatBackend::HttpChatBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  split_url(endpoint_.base_url);
  if (endpoint_.model.empty()) throw Error(ErrorCode::kInvalidConfig, "chat model is not configured");
}

Completion HttpChatBackend::complete(const ChatRequest& request) {
  nlohmann::json body = {
      {"model", endpoint_.model},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", request.system_prompt}},
                              {{"role", "user"}, {"content", request.user_prompt}}})},
      {"temperature", request.params.temperature},
      {"max_tokens", request.params.max_output_tokens},
      {"top_p", request.params.top_p},
      {"frequency_penalty", request.params.frequency_penalty},
  };
  const auto j = post_json(endpoint_, "/chat/completions", body);
  try {
    const auto& choice = j.at("choices").at(0);
    Completion out;
    const auto& content = choice.at("message").at("content");
    out.text = content.is_null() ? std::string() : content.get<std::string>();
    out.truncated = choice.value("finish_reason", std::string()) == "length";
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, std::string("unexpected chat response shape: ") + e.what());
  }
}

HttpEmbeddingBackend::HttpEmbeddingBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  split_url(endpoint_.base_url);
  if (endpoint_.model.empty()) throw Error(ErrorCode::kInvalidConfig, "embedding model is not configured");
}

std::vector<EmbeddingVector> HttpEmbeddingBackend::embed(const std::vector<std::string>& texts) {
  const auto j = post_json(endpoint_, "/embeddings", {{"model", endpoint_.model}, {"input", texts}});
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<bool> filled(texts.size(), false);
  try {
    const auto& data = j.at("data");
    if (data.size() != texts.size()) {
      throw Error(ErrorCode::kBackendUnavailable, "embedding response has " + std::to_string(data.size()) +
                                                      " items for " + std::to_string(texts.size()) + " inputs");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t at = data[i].value("index", i);
      if (at >= texts.size() || filled[at]) {
        throw Error(ErrorCode::kBackendUnavailable, "embedding response has a bad index");
      }
      filled[at] = true;
      out[at].values = data[i].at("embedding").get<std::vector<float>>();
      out[at].model_id = endpoint_.model;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, std::string("unexpected embedding response shape: ") + e.what());
  }
  return out;
}

std::string api_key_from_env() {
  const char* key = std::getenv("FINDEBATE_API_KEY");
  return key ? std::string(key) : std::string();
}

}  // namespace findebate
