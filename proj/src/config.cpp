#include "findebate/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "findebate/error.hpp"
#include "findebate/transcript.hpp"

namespace findebate {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::kInvalidConfig, std::string(key) + ": expected an integer, got '" + std::string(value) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  const std::string s(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(out)) {
    throw Error(ErrorCode::kInvalidConfig, std::string(key) + ": expected a number, got '" + s + "'");
  }
  return out;
}

void set_param(GenerationParams& p, std::string_view key, std::string_view name, std::string_view value) {
  if (name == "temperature") {
    p.temperature = parse_double(key, value);
  } else if (name == "max_output_tokens") {
    p.max_output_tokens = parse_integer<int>(key, value);
  } else if (name == "top_p") {
    p.top_p = parse_double(key, value);
  } else if (name == "frequency_penalty") {
    p.frequency_penalty = parse_double(key, value);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + std::string(key) + "'");
  }
}

nlohmann::json params_json(const GenerationParams& p) {
  return {{"temperature", p.temperature},
          {"max_output_tokens", p.max_output_tokens},
          {"top_p", p.top_p},
          {"frequency_penalty", p.frequency_penalty}};
}

}  // namespace

std::string_view mode_name(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::kZeroShot: return "zero_shot";
    case PipelineMode::kStandardRag: return "standard_rag";
    case PipelineMode::kMultiAgentNoDebate: return "multi_agent";
    case PipelineMode::kFinDebate: return "findebate";
  }
  return "unknown";
}

std::optional<PipelineMode> parse_mode(std::string_view s) {
  for (PipelineMode m : all_modes()) {
    if (mode_name(m) == s) return m;
  }
  return std::nullopt;
}

const std::vector<PipelineMode>& all_modes() {
  static const std::vector<PipelineMode> kModes = {PipelineMode::kZeroShot, PipelineMode::kStandardRag,
                                                   PipelineMode::kMultiAgentNoDebate, PipelineMode::kFinDebate};
  return kModes;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  if (provider != "mock" && provider != "openai") fail("provider must be mock or openai");
  if (embed_provider != "offline" && embed_provider != "openai") fail("embed_provider must be offline or openai");
  if (judge_provider != "mock" && judge_provider != "openai") fail("judge_provider must be mock or openai");
  if (embed_dim == 0 || embed_dim > 65536) fail("embed_dim must be in [1, 65536]");
  if (max_inflight == 0 || max_inflight > 256) fail("max_inflight must be in [1, 256]");
  if (retry_attempts < 1 || retry_attempts > 20) fail("retry_attempts must be in [1, 20]");
  if (retry_backoff_ms < 0) fail("retry_backoff_ms must be >= 0");
  if (max_embed_batch == 0) fail("max_embed_batch must be positive");
  if (http_timeout_s <= 0) fail("http_timeout_s must be positive");
  segmenter.validate();
  if (k_per_dimension == 0) fail("k_per_dimension must be positive");
  if (evidence_budget == 0) fail("evidence_budget must be positive");
  if (standard_rag_top_k == 0) fail("standard_rag_top_k must be positive");
  params.validate();
  for (const auto& [role, p] : agent_params) p.validate();
  if (debate_rounds < 1 || debate_rounds > 10) fail("debate_rounds must be in [1, 10]");
  if (thresholds.min_conviction < 0 || thresholds.max_conviction > 100 ||
      thresholds.min_conviction > thresholds.max_conviction || thresholds.max_conviction_delta < 0) {
    fail("conviction thresholds must satisfy 0 <= min <= max <= 100 and delta >= 0");
  }
}

GenerationParams RunConfig::params_for(std::string_view role_tag) const {
  auto it = agent_params.find(std::string(role_tag));
  return it == agent_params.end() ? params : it->second;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  const std::string v(value);
  if (key == "mode") {
    auto m = parse_mode(value);
    if (!m) throw Error(ErrorCode::kInvalidConfig, "unknown mode '" + v + "'");
    cfg.mode = *m;
  } else if (key == "provider") {
    cfg.provider = v;
  } else if (key == "embed_provider") {
    cfg.embed_provider = v;
  } else if (key == "base_url") {
    cfg.base_url = v;
  } else if (key == "chat_model") {
    cfg.chat_model = v;
  } else if (key == "embed_model") {
    cfg.embed_model = v;
  } else if (key == "embed_dim") {
    cfg.embed_dim = parse_integer<std::size_t>(key, value);
  } else if (key == "judge_provider") {
    cfg.judge_provider = v;
  } else if (key == "judge_base_url") {
    cfg.judge_base_url = v;
  } else if (key == "judge_model") {
    cfg.judge_model = v;
  } else if (key == "max_inflight") {
    cfg.max_inflight = parse_integer<std::size_t>(key, value);
  } else if (key == "retry_attempts") {
    cfg.retry_attempts = parse_integer<int>(key, value);
  } else if (key == "retry_backoff_ms") {
    cfg.retry_backoff_ms = parse_integer<int>(key, value);
  } else if (key == "max_embed_batch") {
    cfg.max_embed_batch = parse_integer<std::size_t>(key, value);
  } else if (key == "http_timeout_s") {
    cfg.http_timeout_s = parse_integer<int>(key, value);
  } else if (key == "max_chunk_tokens") {
    cfg.segmenter.max_chunk_tokens = parse_integer<std::size_t>(key, value);
  } else if (key == "min_chunk_tokens") {
    cfg.segmenter.min_chunk_tokens = parse_integer<std::size_t>(key, value);
  } else if (key == "k_per_dimension") {
    cfg.k_per_dimension = parse_integer<std::size_t>(key, value);
  } else if (key == "evidence_budget") {
    cfg.evidence_budget = parse_integer<std::size_t>(key, value);
  } else if (key == "standard_rag_top_k") {
    cfg.standard_rag_top_k = parse_integer<std::size_t>(key, value);
  } else if (key == "query_bank") {
    cfg.query_bank = v;
  } else if (key == "temperature" || key == "max_output_tokens" || key == "top_p" || key == "frequency_penalty") {
    set_param(cfg.params, key, key, value);
  } else if (key.starts_with("agent.")) {
    const std::string_view rest = key.substr(6);
    const auto dot = rest.find('.');
    if (dot == std::string_view::npos || dot == 0) {
      throw Error(ErrorCode::kInvalidConfig, "expected agent.<role>.<param>, got '" + std::string(key) + "'");
    }
    const std::string role(rest.substr(0, dot));
    auto it = cfg.agent_params.try_emplace(role, cfg.params).first;
    set_param(it->second, key, rest.substr(dot + 1), value);
  } else if (key == "debate_rounds") {
    cfg.debate_rounds = parse_integer<int>(key, value);
  } else if (key == "min_conviction") {
    cfg.thresholds.min_conviction = parse_integer<int>(key, value);
  } else if (key == "max_conviction") {
    cfg.thresholds.max_conviction = parse_integer<int>(key, value);
  } else if (key == "max_conviction_delta") {
    cfg.thresholds.max_conviction_delta = parse_integer<int>(key, value);
  } else if (key == "out_dir") {
    cfg.out_dir = v;
  } else if (key == "mock_seed") {
    cfg.mock_seed = parse_integer<std::uint64_t>(key, value);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::istringstream in(normalize_newlines(read_file(path)));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      set_config_value(cfg, trim(t.substr(0, eq)), t.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidConfig, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json agents = nlohmann::json::object();
  for (const auto& [role, p] : cfg.agent_params) agents[role] = params_json(p);
  return {
      {"mode", mode_name(cfg.mode)},
      {"provider", cfg.provider},
      {"embed_provider", cfg.embed_provider},
      {"base_url", cfg.base_url},
      {"chat_model", cfg.chat_model},
      {"embed_model", cfg.embed_model},
      {"embed_dim", cfg.embed_dim},
      {"judge_provider", cfg.judge_provider},
      {"judge_model", cfg.judge_model},
      {"max_inflight", cfg.max_inflight},
      {"retry_attempts", cfg.retry_attempts},
      {"retry_backoff_ms", cfg.retry_backoff_ms},
      {"max_embed_batch", cfg.max_embed_batch},
      {"max_chunk_tokens", cfg.segmenter.max_chunk_tokens},
      {"min_chunk_tokens", cfg.segmenter.min_chunk_tokens},
      {"k_per_dimension", cfg.k_per_dimension},
      {"evidence_budget", cfg.evidence_budget},
      {"standard_rag_top_k", cfg.standard_rag_top_k},
      {"query_bank", cfg.query_bank.empty() ? std::string("builtin") : cfg.query_bank.filename().string()},
      {"generation", params_json(cfg.params)},
      {"agent_overrides", agents},
      {"debate_rounds", cfg.debate_rounds},
      {"min_conviction", cfg.thresholds.min_conviction},
      {"max_conviction", cfg.thresholds.max_conviction},
      {"max_conviction_delta", cfg.thresholds.max_conviction_delta},
      {"mock_seed", cfg.mock_seed},
  };
}

}  // namespace findebate
