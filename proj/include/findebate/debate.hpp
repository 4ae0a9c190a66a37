#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "findebate/agents.hpp"
#include "findebate/gateway.hpp"
#include "findebate/report.hpp"

namespace findebate {

enum class DebatePhase { kSafetyCheck, kTrust, kSkeptic, kLeader, kFinalCheck };
enum class DebateOutcome { kOptimized, kSkippedNoRecommendations, kRevertedCoreCompromised, kRevertedPhaseFailure };

std::string_view phase_name(DebatePhase phase);
std::string_view outcome_name(DebateOutcome outcome);

struct DebateLogEntry {
  DebatePhase phase = DebatePhase::kSafetyCheck;
  int round = 0;  // 0 for the opening safety check
  std::string prompt_digest;
  std::string response_digest;  // empty for checks
  std::string verdict;
  std::int64_t elapsed_ms = 0;
  // Texts behind the digests. For checks the "prompt" is the report examined.
  std::string prompt_text;
  std::string response_text;
};

struct DebateSession {
  StructuredReport r0;
  std::optional<StructuredReport> r1;  // report handed to the Skeptic
  std::optional<StructuredReport> r2;  // report handed to the Leader
  std::optional<StructuredReport> r_star;
  std::vector<AgentAnalysis> analyses;
  std::vector<DebateLogEntry> log;
  DebateOutcome outcome = DebateOutcome::kSkippedNoRecommendations;
  std::string failure;  // set for kRevertedPhaseFailure

  /// r_star when optimized, r0 otherwise.
  const StructuredReport& final_report() const;
};

struct DebateOptions {
  int rounds = 1;
  SafetyThresholds thresholds;
};

/// Trust, Skeptic and Leader specs; the system prompts are the role texts verbatim.
std::vector<AgentSpec> debate_agent_specs();

/// Verdict recorded when an intermediate phase output is thrown away.
inline constexpr std::string_view kDiscardedVerdict = "discarded: stance violation";

/// Each round runs Trust, Skeptic and Leader in sequence. Trust and Skeptic
/// outputs that compromise r0's stance or drop headings are discarded and their
/// input passed on. After each round the Leader output must not compromise r0,
/// otherwise r0 is returned. Any failed model call also returns r0.
DebateSession run_safe_debate(const StructuredReport& r0, const std::vector<AgentAnalysis>& analyses,
                              ModelGateway& gateway, const DebateOptions& options = {},
                              const std::vector<AgentSpec>& specs = debate_agent_specs());

/// Markdown audit document: outcome, one block per log entry, stance table, digests.
std::string render_debate_report(const DebateSession& session);

/// Phase, round, digests and verdict per entry. Timings are left out so the
/// file is reproducible.
nlohmann::json debate_log_json(const DebateSession& session);

}  // namespace findebate
