#include "findebate/agents.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <regex>
#include <set>

#include <json.hpp>

#include "findebate/error.hpp"
#include "findebate/json_io.hpp"
#include "findebate/prompts.hpp"

namespace findebate {
namespace {

constexpr std::string_view kAnalystTemplate =
    "Company: {title}\n"
    "Ticker: {ticker}\n"
    "Transcript id: {doc_id}\n"
    "\n"
    "Earnings call evidence retrieved for this analysis. Cite chunk ids in square brackets when you rely on a "
    "passage.\n"
    "\n"
    "{evidence}\n"
    "\n"
    "Write your analysis following your framework, using only the evidence above.";

constexpr std::string_view kGrammarBlock =
    "1-DAY TRADING RECOMMENDATION\n"
    "Position: [LONG/SHORT/NEUTRAL]\n"
    "Conviction: [X%]\n"
    "\n"
    "1-WEEK MOMENTUM STRATEGY\n"
    "Position: [LONG/SHORT/NEUTRAL]\n"
    "Conviction: [X%]\n"
    "\n"
    "1-MONTH FUNDAMENTAL POSITION\n"
    "Position: [LONG/SHORT/NEUTRAL]\n"
    "Conviction: [X%]";

std::string report_template(std::string_view inputs) {
  return "Company: {title}\n"
         "Ticker: {ticker}\n"
         "Transcript id: {doc_id}\n"
         "\n" +
         std::string(inputs) +
         "\n"
         "\n"
         "Write one institutional investment report with clear chapters. State every horizon in exactly "
         "this form:\n"
         "\n" +
         std::string(kGrammarBlock);
}

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::vector<std::string> cited_ids(const std::string& text, const EvidenceBundle& bundle) {
  static const std::regex kId(R"(\[([^\]\s]+#[0-9]{5})\])");
  std::set<std::string> known;
  for (const auto& d : bundle.per_dimension) {
    for (const auto& h : d.hits) known.insert(h.chunk_id);
  }
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kId); it != std::sregex_iterator(); ++it) {
    const std::string id = (*it)[1].str();
    if (known.count(id) && seen.insert(id).second) out.push_back(id);
  }
  return out;
}

}  // namespace

std::string_view role_name(AgentRole role) {
  switch (role) {
    case AgentRole::kEarnings: return "Earnings";
    case AgentRole::kMarketPredictor: return "MarketPredictor";
    case AgentRole::kSentiment: return "Sentiment";
    case AgentRole::kValuation: return "Valuation";
    case AgentRole::kRisk: return "Risk";
    case AgentRole::kSynthesizer: return "Synthesizer";
    case AgentRole::kTrust: return "Trust";
    case AgentRole::kSkeptic: return "Skeptic";
    case AgentRole::kLeader: return "Leader";
  }
  return "Unknown";
}

std::string_view role_tag(AgentRole role) {
  switch (role) {
    case AgentRole::kEarnings: return "earnings_analyst";
    case AgentRole::kMarketPredictor: return "market_predictor";
    case AgentRole::kSentiment: return "sentiment_analyst";
    case AgentRole::kValuation: return "valuation_analyst";
    case AgentRole::kRisk: return "risk_analyst";
    case AgentRole::kSynthesizer: return "report_synthesizer";
    case AgentRole::kTrust: return "trust_agent";
    case AgentRole::kSkeptic: return "skeptic_agent";
    case AgentRole::kLeader: return "leader_agent";
  }
  return "unknown";
}

std::optional<AgentRole> role_from_tag(std::string_view tag) {
  for (int i = 0; i <= static_cast<int>(AgentRole::kLeader); ++i) {
    const auto role = static_cast<AgentRole>(i);
    if (role_tag(role) == tag) return role;
  }
  return std::nullopt;
}

bool is_analyst(AgentRole role) {
  return std::find(kAnalystRoles.begin(), kAnalystRoles.end(), role) != kAnalystRoles.end();
}

std::vector<AgentSpec> builtin_agent_specs() {
  auto analyst = [](AgentRole role, std::string_view system, std::optional<std::pair<int, int>> words) {
    return AgentSpec{role, std::string(system), std::string(kAnalystTemplate), words, {}};
  };
  return {
      analyst(AgentRole::kEarnings, prompts::kEarningsAnalystSystem, std::make_pair(1200, 1500)),
      analyst(AgentRole::kMarketPredictor, prompts::kMarketPredictorSystem, std::make_pair(1100, 1400)),
      analyst(AgentRole::kSentiment, prompts::kSentimentAnalystSystem, std::make_pair(1000, 1300)),
      analyst(AgentRole::kValuation, prompts::kValuationAnalystSystem, std::nullopt),
      analyst(AgentRole::kRisk, prompts::kRiskAnalystSystem, std::nullopt),
      AgentSpec{AgentRole::kSynthesizer, std::string(prompts::kSynthesizerSystem),
                report_template("Specialist analyses:\n\n{analyses}\n\nEarnings call evidence:\n\n{evidence}"),
                std::nullopt,
                {}},
  };
}

const AgentSpec& find_spec(const std::vector<AgentSpec>& specs, AgentRole role) {
  auto it = std::find_if(specs.begin(), specs.end(), [&](const AgentSpec& s) { return s.role == role; });
  if (it == specs.end()) {
    throw Error(ErrorCode::kPreconditionViolation, "no spec registered for role " + std::string(role_name(role)));
  }
  return *it;
}

AgentSpec zero_shot_spec() {
  return AgentSpec{AgentRole::kSynthesizer, std::string(prompts::kSynthesizerSystem),
                   report_template("Earnings call transcript:\n\n{transcript}"), std::nullopt, {}};
}

AgentSpec standard_rag_spec() {
  return AgentSpec{AgentRole::kSynthesizer, std::string(prompts::kSynthesizerSystem),
                   report_template("Earnings call evidence:\n\n{evidence}"), std::nullopt, {}};
}

std::string fill_template(std::string_view tmpl, const PromptFields& fields) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && is_ident_char(tmpl[j])) ++j;
      if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
        const std::string name(tmpl.substr(i + 1, j - i - 1));
        auto it = fields.find(name);
        if (it == fields.end()) {
          throw Error(ErrorCode::kMissingPlaceholder, "template references unknown field {" + name + "}");
        }
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

ChatRequest compose_prompt(const AgentSpec& spec, const PromptFields& fields) {
  ChatRequest req;
  req.system_prompt = spec.system_prompt;
  req.user_prompt = fill_template(spec.user_prompt_template, fields);
  req.params = spec.params;
  req.role_tag = std::string(role_tag(spec.role));
  return req;
}

ChatRequest compose_prompt(const AgentSpec& spec, std::string_view evidence_text, const TranscriptDocument& doc,
                           const PromptFields& extra) {
  if (blank(evidence_text)) throw Error(ErrorCode::kPreconditionViolation, "evidence text is empty");
  PromptFields fields = extra;
  fields["evidence"] = std::string(evidence_text);
  fields["doc_id"] = doc.doc_id;
  fields["title"] = doc.title;
  fields["ticker"] = doc.ticker.value_or("n/a");
  return compose_prompt(spec, fields);
}

std::vector<AgentAnalysis> run_agents(const std::vector<AgentSpec>& specs, const EvidenceBundle& bundle,
                                      const TranscriptDocument& doc, ModelGateway& gateway,
                                      std::size_t evidence_budget) {
  std::vector<const AgentSpec*> ordered;
  for (AgentRole role : kAnalystRoles) ordered.push_back(&find_spec(specs, role));
  const std::string evidence = render_evidence(bundle, evidence_budget);

  std::vector<std::future<AgentAnalysis>> pending;
  for (const AgentSpec* spec : ordered) {
    pending.push_back(std::async(std::launch::async, [&, spec] {
      const ChatRequest req = compose_prompt(*spec, evidence, doc);
      const auto start = std::chrono::steady_clock::now();
      ChatResult result = gateway.chat_detailed(req);
      const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
      AgentAnalysis a;
      a.role = spec->role;
      a.evidence_ids_cited = cited_ids(result.text, bundle);
      a.text = std::move(result.text);
      a.elapsed_ms = elapsed.count();
      a.model_id = std::move(result.model_id);
      return a;
    }));
  }

  std::vector<AgentAnalysis> out;
  std::optional<Error> failure;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    try {
      out.push_back(pending[i].get());
    } catch (const std::exception& e) {
      if (!failure) {
        failure.emplace(ErrorCode::kAgentFailed,
                        "role " + std::string(role_name(ordered[i]->role)) + " failed: " + e.what());
      }
    }
  }
  if (failure) throw *failure;
  return out;
}

std::string render_analyses(const std::vector<AgentAnalysis>& analyses) {
  std::string out;
  for (const auto& a : analyses) {
    if (!out.empty()) out += "\n\n";
    out += "### " + std::string(role_name(a.role)) + "\n\n" + a.text;
    while (!out.empty() && out.back() == '\n') out.pop_back();
  }
  return out;
}

DraftReport synthesize_report(const std::vector<AgentAnalysis>& analyses, const EvidenceBundle& bundle,
                              const TranscriptDocument& doc, ModelGateway& gateway, const AgentSpec& synthesizer,
                              std::size_t evidence_budget) {
  std::set<AgentRole> roles;
  for (const auto& a : analyses) {
    if (is_analyst(a.role)) roles.insert(a.role);
  }
  if (analyses.size() != kAnalystRoles.size() || roles.size() != kAnalystRoles.size()) {
    throw Error(ErrorCode::kPreconditionViolation, "synthesis needs exactly one analysis per analyst role");
  }
  std::vector<AgentAnalysis> ordered;
  for (AgentRole role : kAnalystRoles) {
    ordered.push_back(*std::find_if(analyses.begin(), analyses.end(), [&](const AgentAnalysis& a) { return a.role == role; }));
  }

  const ChatRequest req = compose_prompt(synthesizer, render_evidence(bundle, evidence_budget), doc,
                                         {{"analyses", render_analyses(ordered)}});
  std::string text;
  try {
    text = gateway.chat(req);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kAgentFailed, "role Synthesizer failed: " + std::string(e.what()));
  }
  DraftReport draft;
  draft.report = parse_report(text);
  draft.markdown = std::move(text);
  draft.source_analyses = std::move(ordered);
  draft.missing_recommendations = !has_recommendations(draft.report);
  return draft;
}

std::string recommendations_json(const std::vector<Recommendation>& recs) {
  return nlohmann::json(recs).dump(2) + "\n";
}

void write_agent_artifacts(const std::filesystem::path& dir, const DraftReport& draft) {
  for (const auto& a : draft.source_analyses) {
    write_file(dir / "analyses" / (std::string(role_tag(a.role)) + ".md"), a.text);
  }
  write_file(dir / "draft_report.md", draft.markdown);
  write_file(dir / "draft_recommendations.json", recommendations_json(draft.report.recommendations));
}

std::vector<AgentAnalysis> read_analyses(const std::filesystem::path& dir) {
  std::vector<AgentAnalysis> out;
  for (AgentRole role : kAnalystRoles) {
    const auto path = dir / (std::string(role_tag(role)) + ".md");
    if (!std::filesystem::exists(path)) continue;
    AgentAnalysis a;
    a.role = role;
    a.text = read_file(path);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace findebate
