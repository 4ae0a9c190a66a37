#include "findebate/debate.hpp"

#include <chrono>

#include "findebate/error.hpp"
#include "findebate/hashing.hpp"
#include "findebate/prompts.hpp"

namespace findebate {
namespace {

constexpr std::string_view kDebateTemplate =
    "Report under review:\n"
    "\n"
    "<<<REPORT\n"
    "{report}\n"
    "REPORT>>>\n"
    "\n"
    "Specialist analyses:\n"
    "\n"
    "{analyses}\n"
    "\n"
    "{instruction}";

std::string_view instruction_for(AgentRole role) {
  switch (role) {
    case AgentRole::kTrust:
      return "Return the complete enhanced report. Keep every timeframe section with its Position and Conviction "
             "lines unchanged.";
    case AgentRole::kSkeptic:
      return "Return the complete report with strengthened risk discussion. Keep every timeframe section with its "
             "Position and Conviction lines unchanged.";
    default:
      return "Return the FINAL OPTIMIZED REPORT in full. Keep every timeframe section with its Position and "
             "Conviction lines.";
  }
}

DebatePhase phase_of(AgentRole role) {
  switch (role) {
    case AgentRole::kTrust: return DebatePhase::kTrust;
    case AgentRole::kSkeptic: return DebatePhase::kSkeptic;
    default: return DebatePhase::kLeader;
  }
}

std::int64_t ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
}

DebateLogEntry check_entry(DebatePhase phase, int round, const std::string& examined, std::string verdict) {
  DebateLogEntry e;
  e.phase = phase;
  e.round = round;
  e.prompt_text = examined;
  e.prompt_digest = sha256_hex(examined);
  e.verdict = std::move(verdict);
  return e;
}

std::string stance_cell(const StructuredReport& r, Timeframe t) {
  const Recommendation* rec = r.find(t);
  if (!rec) return "-";
  std::string s(position_name(rec->position));
  if (rec->conviction_pct) s += " " + std::to_string(*rec->conviction_pct) + "%";
  return s;
}

}  // namespace

std::string_view phase_name(DebatePhase phase) {
  switch (phase) {
    case DebatePhase::kSafetyCheck: return "SafetyCheck";
    case DebatePhase::kTrust: return "Trust";
    case DebatePhase::kSkeptic: return "Skeptic";
    case DebatePhase::kLeader: return "Leader";
    case DebatePhase::kFinalCheck: return "FinalCheck";
  }
  return "Unknown";
}

std::string_view outcome_name(DebateOutcome outcome) {
  switch (outcome) {
    case DebateOutcome::kOptimized: return "Optimized";
    case DebateOutcome::kSkippedNoRecommendations: return "SkippedNoRecommendations";
    case DebateOutcome::kRevertedCoreCompromised: return "RevertedCoreCompromised";
    case DebateOutcome::kRevertedPhaseFailure: return "RevertedPhaseFailure";
  }
  return "Unknown";
}

const StructuredReport& DebateSession::final_report() const {
  if (outcome == DebateOutcome::kOptimized && r_star) return *r_star;
  return r0;
}

std::vector<AgentSpec> debate_agent_specs() {
  auto spec = [](AgentRole role, std::string_view system) {
    return AgentSpec{role, std::string(system), std::string(kDebateTemplate), std::nullopt, {}};
  };
  return {spec(AgentRole::kTrust, prompts::kTrustSystem), spec(AgentRole::kSkeptic, prompts::kSkepticSystem),
          spec(AgentRole::kLeader, prompts::kLeaderSystem)};
}

DebateSession run_safe_debate(const StructuredReport& r0, const std::vector<AgentAnalysis>& analyses,
                              ModelGateway& gateway, const DebateOptions& options,
                              const std::vector<AgentSpec>& specs) {
  if (options.rounds < 1) throw Error(ErrorCode::kInvalidConfig, "debate rounds must be >= 1");
  DebateSession s;
  s.r0 = r0;
  s.analyses = analyses;

  if (!has_recommendations(r0)) {
    s.log.push_back(check_entry(DebatePhase::kSafetyCheck, 0, r0.markdown,
                                "skipped: report has no complete set of recommendations"));
    s.outcome = DebateOutcome::kSkippedNoRecommendations;
    return s;
  }
  s.log.push_back(check_entry(DebatePhase::kSafetyCheck, 0, r0.markdown, "passed: recommendations present"));

  std::vector<AgentAnalysis> ordered;
  for (AgentRole role : kAnalystRoles) {
    for (const auto& a : analyses) {
      if (a.role == role) ordered.push_back(a);
    }
  }
  const std::string analyses_text = ordered.empty() ? "(none provided)" : render_analyses(ordered);
  const AgentRole sequence[] = {AgentRole::kTrust, AgentRole::kSkeptic, AgentRole::kLeader};

  StructuredReport current = r0;
  for (int round = 1; round <= options.rounds; ++round) {
    for (AgentRole role : sequence) {
      const ChatRequest req = compose_prompt(find_spec(specs, role), {{"report", current.markdown},
                                                                      {"analyses", analyses_text},
                                                                      {"instruction", std::string(instruction_for(role))}});
      DebateLogEntry entry;
      entry.phase = phase_of(role);
      entry.round = round;
      entry.prompt_text = req.system_prompt + "\n\n" + req.user_prompt;
      entry.prompt_digest = sha256_hex(entry.prompt_text);

      const auto start = std::chrono::steady_clock::now();
      try {
        entry.response_text = gateway.chat(req);
      } catch (const std::exception& e) {
        entry.elapsed_ms = ms_since(start);
        entry.verdict = std::string("failed: ") + e.what();
        s.log.push_back(std::move(entry));
        s.failure = std::string(phase_name(phase_of(role))) + ": " + e.what();
        s.outcome = DebateOutcome::kRevertedPhaseFailure;
        return s;
      }
      entry.elapsed_ms = ms_since(start);
      entry.response_digest = sha256_hex(entry.response_text);
      StructuredReport out = parse_report(entry.response_text);

      if (role == AgentRole::kLeader) {
        entry.verdict = "produced";
        s.r_star = std::move(out);
      } else {
        const bool violates = core_compromised(r0, out, options.thresholds) ||
                              out.section_headings.size() < r0.section_headings.size();
        if (violates) {
          entry.verdict = std::string(kDiscardedVerdict);
        } else {
          entry.verdict = "accepted";
          current = std::move(out);
        }
        (role == AgentRole::kTrust ? s.r1 : s.r2) = current;
      }
      s.log.push_back(std::move(entry));
    }

    if (core_compromised(r0, *s.r_star, options.thresholds)) {
      s.log.push_back(check_entry(DebatePhase::kFinalCheck, round, s.r_star->markdown,
                                  "core compromised: reverted to original report"));
      s.outcome = DebateOutcome::kRevertedCoreCompromised;
      return s;
    }
    s.log.push_back(check_entry(DebatePhase::kFinalCheck, round, s.r_star->markdown, "passed: stance preserved"));
    current = *s.r_star;
  }
  s.outcome = DebateOutcome::kOptimized;
  return s;
}

std::string render_debate_report(const DebateSession& session) {
  std::string out = "# Debate audit\n\noutcome: " + std::string(outcome_name(session.outcome)) + "\n";
  if (!session.failure.empty()) out += "failure: " + session.failure + "\n";
  if (session.outcome == DebateOutcome::kSkippedNoRecommendations) {
    out += "reason: the original report does not state a position for every timeframe, so it was returned "
           "unchanged\n";
  }
  out += "original digest: " + sha256_hex(session.r0.markdown) + "\n";
  out += "final digest: " + sha256_hex(session.final_report().markdown) + "\n";

  for (const auto& e : session.log) {
    const bool check = e.phase == DebatePhase::kSafetyCheck || e.phase == DebatePhase::kFinalCheck;
    out += "\n### " + std::string(check ? "Check: " : "Phase: ") + std::string(phase_name(e.phase));
    if (e.round > 0) out += " (round " + std::to_string(e.round) + ")";
    out += "\n\n";
    out += "- verdict: " + e.verdict + "\n";
    out += "- " + std::string(check ? "report digest: " : "prompt digest: ") + e.prompt_digest + "\n";
    if (!check) out += "- response digest: " + e.response_digest + "\n";
  }

  out += "\n## Stance\n\n| Timeframe | Original | Final | Change |\n|---|---|---|---|\n";
  const StanceDiff diff = stance_diff(session.r0, session.final_report());
  for (Timeframe t : kAllTimeframes) {
    auto it = diff.per_timeframe.find(t);
    std::string change = it == diff.per_timeframe.end() ? "-" : std::string(stance_change_name(it->second));
    if (auto d = diff.conviction_deltas.find(t); d != diff.conviction_deltas.end() && d->second != 0) {
      change += " (" + std::string(d->second > 0 ? "+" : "") + std::to_string(d->second) + ")";
    }
    out += "| " + std::string(timeframe_name(t)) + " | " + stance_cell(session.r0, t) + " | " +
           stance_cell(session.final_report(), t) + " | " + change + " |\n";
  }
  return out;
}

nlohmann::json debate_log_json(const DebateSession& session) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : session.log) {
    entries.push_back({{"phase", phase_name(e.phase)},
                       {"round", e.round},
                       {"prompt_digest", e.prompt_digest},
                       {"response_digest", e.response_digest},
                       {"verdict", e.verdict}});
  }
  return {{"outcome", outcome_name(session.outcome)},
          {"original_digest", sha256_hex(session.r0.markdown)},
          {"final_digest", sha256_hex(session.final_report().markdown)},
          {"entries", entries}};
}

}  // namespace findebate
