#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "findebate/gateway.hpp"
#include "findebate/report.hpp"
#include "findebate/retrieval.hpp"
#include "findebate/transcript.hpp"

namespace findebate {

enum class AgentRole {
  kEarnings,
  kMarketPredictor,
  kSentiment,
  kValuation,
  kRisk,
  kSynthesizer,
  kTrust,
  kSkeptic,
  kLeader,
};

inline constexpr std::array<AgentRole, 5> kAnalystRoles = {AgentRole::kEarnings, AgentRole::kMarketPredictor,
                                                           AgentRole::kSentiment, AgentRole::kValuation,
                                                           AgentRole::kRisk};

/// "Earnings", "MarketPredictor", ...
std::string_view role_name(AgentRole role);
/// Gateway role tag and artifact file stem: "earnings_analyst", "market_predictor", ...
std::string_view role_tag(AgentRole role);
std::optional<AgentRole> role_from_tag(std::string_view tag);
bool is_analyst(AgentRole role);

struct AgentSpec {
  AgentRole role = AgentRole::kEarnings;
  std::string system_prompt;
  std::string user_prompt_template;  // {identifier} placeholders
  std::optional<std::pair<int, int>> target_words;  // informational; stated inside the prompt
  GenerationParams params;
};

/// Five analysts in canonical order followed by the synthesizer.
std::vector<AgentSpec> builtin_agent_specs();
const AgentSpec& find_spec(const std::vector<AgentSpec>& specs, AgentRole role);

/// Synthesizer system prompt with a user template that takes {transcript}
/// instead of analyses and evidence; tagged "zero_shot".
AgentSpec zero_shot_spec();
/// Synthesizer system prompt over {evidence} only; tagged "standard_rag".
AgentSpec standard_rag_spec();

using PromptFields = std::map<std::string, std::string>;

/// Single pass over the template; substituted values are not rescanned. A
/// `{name}` whose name is an identifier but not a field raises kMissingPlaceholder.
std::string fill_template(std::string_view tmpl, const PromptFields& fields);

/// Fields: evidence, doc_id, title, ticker ("n/a" when unknown), plus `extra`.
/// Throws kPreconditionViolation for blank evidence.
ChatRequest compose_prompt(const AgentSpec& spec, std::string_view evidence_text, const TranscriptDocument& doc,
                           const PromptFields& extra = {});
ChatRequest compose_prompt(const AgentSpec& spec, const PromptFields& fields);

struct AgentAnalysis {
  AgentRole role = AgentRole::kEarnings;
  std::string text;
  std::vector<std::string> evidence_ids_cited;  // bundle chunk ids found in the text, first-mention order
  std::int64_t elapsed_ms = 0;
  std::string model_id;
};

struct DraftReport {
  std::string markdown;
  StructuredReport report;
  std::vector<AgentAnalysis> source_analyses;
  bool missing_recommendations = false;  // the debate will skip this draft
};

/// Runs every analyst spec concurrently and returns the five analyses in
/// canonical order. Throws kAgentFailed naming the first failing role.
std::vector<AgentAnalysis> run_agents(const std::vector<AgentSpec>& specs, const EvidenceBundle& bundle,
                                      const TranscriptDocument& doc, ModelGateway& gateway,
                                      std::size_t evidence_budget = kDefaultEvidenceBudget);

/// Requires exactly the five analyst roles (kPreconditionViolation otherwise).
DraftReport synthesize_report(const std::vector<AgentAnalysis>& analyses, const EvidenceBundle& bundle,
                              const TranscriptDocument& doc, ModelGateway& gateway,
                              const AgentSpec& synthesizer = builtin_agent_specs().back(),
                              std::size_t evidence_budget = kDefaultEvidenceBudget);

/// "### <Role>\n\n<text>" blocks in the given order.
std::string render_analyses(const std::vector<AgentAnalysis>& analyses);

/// analyses/<role_tag>.md, draft_report.md, draft_recommendations.json.
void write_agent_artifacts(const std::filesystem::path& dir, const DraftReport& draft);
/// Reads analyses/<role_tag>.md files back; missing roles are skipped.
std::vector<AgentAnalysis> read_analyses(const std::filesystem::path& dir);

std::string recommendations_json(const std::vector<Recommendation>& recs);

}  // namespace findebate
