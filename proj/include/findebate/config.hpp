#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "findebate/gateway.hpp"
#include "findebate/report.hpp"
#include "findebate/segmenter.hpp"

namespace findebate {

enum class PipelineMode { kZeroShot, kStandardRag, kMultiAgentNoDebate, kFinDebate };

/// "zero_shot", "standard_rag", "multi_agent", "findebate"
std::string_view mode_name(PipelineMode mode);
std::optional<PipelineMode> parse_mode(std::string_view s);
const std::vector<PipelineMode>& all_modes();

/// Every setting of a run. Secrets never live here; the API key comes from
/// FINDEBATE_API_KEY.
struct RunConfig {
  PipelineMode mode = PipelineMode::kFinDebate;

  std::string provider = "mock";           // chat: mock | openai
  std::string embed_provider = "offline";  // offline | openai
  std::string base_url = "https://api.openai.com/v1";
  std::string chat_model = "gpt-4o";
  std::string embed_model = "text-embedding-3-small";
  std::size_t embed_dim = 256;  // offline embedder only

  std::string judge_provider = "mock";
  std::string judge_base_url;  // empty: same as base_url
  std::string judge_model = "gpt-4o";

  std::size_t max_inflight = 4;
  int retry_attempts = 3;
  int retry_backoff_ms = 500;
  std::size_t max_embed_batch = 64;
  int http_timeout_s = 120;

  SegmenterConfig segmenter;
  std::size_t k_per_dimension = 8;
  std::size_t evidence_budget = 3000;
  std::size_t standard_rag_top_k = 16;
  std::filesystem::path query_bank;  // empty: built-in bank

  GenerationParams params;
  std::map<std::string, GenerationParams> agent_params;  // by role tag, overrides `params`

  int debate_rounds = 1;
  SafetyThresholds thresholds;

  std::filesystem::path out_dir = "runs";
  std::uint64_t mock_seed = 0;

  /// Throws kInvalidConfig for out-of-range values.
  void validate() const;
  GenerationParams params_for(std::string_view role_tag) const;
};

/// Sets one key. Keys mirror the field names; per-agent generation overrides use
/// "agent.<role_tag>.<param>", e.g. "agent.risk_analyst.temperature".
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// `key = value` lines; blank lines and lines starting with '#' are ignored.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Recorded in run manifests; out_dir is left out so manifests do not depend on
/// where the run was written.
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace findebate
