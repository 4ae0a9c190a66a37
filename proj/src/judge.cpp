#include "findebate/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <future>

#include "findebate/error.hpp"
#include "findebate/prompts.hpp"

namespace findebate {
namespace {

constexpr std::string_view kInstructions =
    "# INSTRUCTIONS\n"
    "You are a financial expert tasked with evaluating a summary of an earnings call meeting intended to provide "
    "useful information to a potential investor.\n"
    "\n"
    "# CRITERION\n"
    "You must identify whether or not the summary contains the information relating to the aspect described below "
    "and, if it does, assess how well the information is reported.\n";

struct RubricText {
  std::string_view criterion;
  std::string_view labels[4];
};

// Criteria and labels for the dimensions that have no published prompt, written
// from the dimension definitions in the same shape as the published two.
RubricText reconstructed(EvalDimension d) {
  switch (d) {
    case EvalDimension::kReadability:
      return {"Assess the clarity and fluency of the report's language, including grammar, style, and ease of "
              "reading for an investor.",
              {"The report is hard to read, with frequent grammatical errors or confusing phrasing.",
               "Readable in places but awkward, with errors or stylistic problems that obscure meaning.",
               "Clear and fluent overall with only minor lapses in grammar or style.",
               "Consistently clear, fluent, and easy to read throughout."}};
    case EvalDimension::kLanguageAbstractness:
      return {"Assess the degree of summarization and synthesis beyond raw data repetition. Strong reports distil "
              "the call into conclusions rather than restating figures.",
              {"The report only repeats raw statements or figures without synthesis.",
               "Some summarization, but mostly restates data without drawing conclusions.",
               "Summarizes and synthesizes most content, with some raw repetition left.",
               "Distils the call into well-abstracted insights with no needless repetition."}};
    case EvalDimension::kCoherence:
      return {"Assess the logical flow and structural clarity across paragraphs and ideas.",
              {"The report is disorganized; ideas do not connect.",
               "Some structure, but transitions are weak and ideas jump abruptly.",
               "Mostly well organized with a logical flow and minor structural gaps.",
               "Tightly structured; every section follows logically from the previous one."}};
    case EvalDimension::kBackgroundContextAdequacy:
      return {"Assess whether the report provides historical or industry context and explanations for the "
              "reported performance.",
              {"No background or context is given for the results.",
               "Mentions context superficially without explaining performance drivers.",
               "Provides relevant context for most results with some gaps.",
               "Gives thorough historical and industry context that explains the performance."}};
    case EvalDimension::kManagementSentimentConveyance:
      return {"Assess how accurately the report reflects management's expressed tone, such as optimism or "
              "caution, during the call.",
              {"Management's tone is absent or misrepresented.",
               "Tone is mentioned but vaguely or with notable distortion.",
               "Conveys management's tone reasonably well with minor omissions.",
               "Captures management's tone precisely, including nuances of optimism and caution."}};
    case EvalDimension::kFutureOutlookAnalysis:
      return {"Assess whether the report covers guidance, forecasts, or strategic plans for future performance.",
              {"No forward-looking information is reported.",
               "Mentions the outlook briefly without useful detail.",
               "Reports most guidance and plans with some details missing.",
               "Comprehensively analyzes guidance, forecasts, and strategic plans."}};
    default:
      return {};
  }
}

std::string labels_block(const RubricText& r) {
  static constexpr std::string_view kNames[4] = {"Not reported", "Reported but not useful", "Reported and reasonable",
                                                 "Reported and insightful"};
  std::string out = "# LABELS\n";
  for (int i = 0; i < 4; ++i) {
    out += std::to_string(i + 1) + ". " + std::string(kNames[i]) + ": " + std::string(r.labels[i]);
    if (i < 3) out += "\n";
  }
  return out;
}

bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string judge_user_prompt(const std::string& report, const std::string& transcript) {
  return "# SUMMARY\n" + report + "\n\n# EARNINGS CALL TRANSCRIPT\n" + transcript +
         "\n\nAnswer with the number of the label that applies.";
}

}  // namespace

std::string_view dimension_name(EvalDimension d) {
  switch (d) {
    case EvalDimension::kReadability: return "Readability";
    case EvalDimension::kLanguageAbstractness: return "LanguageAbstractness";
    case EvalDimension::kCoherence: return "Coherence";
    case EvalDimension::kFinancialKeyPointsCoverage: return "FinancialKeyPointsCoverage";
    case EvalDimension::kBackgroundContextAdequacy: return "BackgroundContextAdequacy";
    case EvalDimension::kManagementSentimentConveyance: return "ManagementSentimentConveyance";
    case EvalDimension::kFutureOutlookAnalysis: return "FutureOutlookAnalysis";
    case EvalDimension::kFactualAccuracy: return "FactualAccuracy";
  }
  return "Unknown";
}

std::string_view dimension_title(EvalDimension d) {
  switch (d) {
    case EvalDimension::kReadability: return "Readability";
    case EvalDimension::kLanguageAbstractness: return "Language Abstractness";
    case EvalDimension::kCoherence: return "Coherence";
    case EvalDimension::kFinancialKeyPointsCoverage: return "Financial Key Points Coverage";
    case EvalDimension::kBackgroundContextAdequacy: return "Background Context Adequacy";
    case EvalDimension::kManagementSentimentConveyance: return "Management Sentiment Conveyance";
    case EvalDimension::kFutureOutlookAnalysis: return "Future Outlook Analysis";
    case EvalDimension::kFactualAccuracy: return "Factual Accuracy";
  }
  return "Unknown";
}

std::string_view dimension_definition(EvalDimension d) {
  switch (d) {
    case EvalDimension::kReadability:
      return "Clarity and fluency of the report’s language; grammar, style, and ease of reading.";
    case EvalDimension::kLanguageAbstractness: return "Degree of summarization and synthesis beyond raw data repetition.";
    case EvalDimension::kCoherence: return "Logical flow and structural clarity across paragraphs and ideas.";
    case EvalDimension::kFinancialKeyPointsCoverage:
      return "Inclusion of core earnings highlights (revenue, profit, margins, guidance).";
    case EvalDimension::kBackgroundContextAdequacy:
      return "Provision of historical/industry context and explanations for performance.";
    case EvalDimension::kManagementSentimentConveyance:
      return "Accuracy in reflecting management’s expressed tone (optimism, caution, etc.).";
    case EvalDimension::kFutureOutlookAnalysis:
      return "Reporting of guidance, forecasts, or strategic plans for future performance.";
    case EvalDimension::kFactualAccuracy:
      return "Alignment of all statements and figures with official transcripts and filings.";
  }
  return "";
}

std::optional<EvalDimension> parse_dimension_name(std::string_view s) {
  for (EvalDimension d : kAllEvalDimensions) {
    if (dimension_name(d) == s) return d;
  }
  return std::nullopt;
}

std::string rubric_prompt(EvalDimension d) {
  std::string out;
  if (d == EvalDimension::kFinancialKeyPointsCoverage) {
    out = std::string(prompts::kKeyPointsCoverageRubric);
  } else if (d == EvalDimension::kFactualAccuracy) {
    out = std::string(prompts::kFactualAccuracyRubric);
  } else {
    const RubricText r = reconstructed(d);
    out = std::string(kInstructions) + std::string(dimension_title(d)) + ": " + std::string(r.criterion) + "\n\n" +
          labels_block(r);
  }
  return out + "\n\nDefinition of " + std::string(dimension_title(d)) + ": " + std::string(dimension_definition(d));
}

std::optional<int> parse_verdict(std::string_view reply) {
  std::size_t i = 0;
  while (i < reply.size()) {
    if (!is_digit(reply[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < reply.size() && is_digit(reply[j])) ++j;
    const bool word_before = i > 0 && is_word(reply[i - 1]);
    const bool decimal_before = i > 1 && reply[i - 1] == '.' && is_digit(reply[i - 2]);
    const bool word_after = j < reply.size() && is_word(reply[j]);
    const bool decimal_after = j + 1 < reply.size() && reply[j] == '.' && is_digit(reply[j + 1]);
    if (!word_before && !decimal_before && !word_after && !decimal_after && j - i == 1) {
      const int v = reply[i] - '0';
      if (v >= 1 && v <= 4) return v;
    }
    i = j;
  }
  return std::nullopt;
}

int judge_dimension(const std::string& report_text, const std::string& source_transcript, EvalDimension dim,
                    ModelGateway& gateway) {
  ChatRequest req;
  req.system_prompt = rubric_prompt(dim);
  req.user_prompt = judge_user_prompt(report_text, source_transcript);
  req.role_tag = "judge_" + std::string(dimension_name(dim));
  std::string reply = gateway.chat(req);
  if (auto v = parse_verdict(reply)) return *v;

  req.user_prompt += "\n\n" + std::string(kStrictVerdictInstruction);
  reply = gateway.chat(req);
  if (auto v = parse_verdict(reply)) return *v;
  throw Error(ErrorCode::kUnparseableVerdict,
              std::string(dimension_name(dim)) + " verdict unusable after retry: " + reply.substr(0, 80));
}

int Scorecard::total() const {
  int sum = 0;
  for (const auto& [d, s] : scores) sum += s;
  return sum;
}

Scorecard make_scorecard(std::string report_id, std::string mode, std::map<EvalDimension, int> scores,
                         std::string judge_model, std::string generator_model) {
  if (scores.size() != kAllEvalDimensions.size()) {
    throw Error(ErrorCode::kPreconditionViolation, "scorecard must cover all eight dimensions");
  }
  for (const auto& [d, s] : scores) {
    if (s < 1 || s > 4) throw Error(ErrorCode::kPreconditionViolation, "score out of range 1-4");
  }
  Scorecard card{std::move(report_id), std::move(mode), std::move(scores), 0.0, std::move(judge_model),
                 std::move(generator_model)};
  card.mean = static_cast<double>(card.total()) / static_cast<double>(kAllEvalDimensions.size());
  return card;
}

Scorecard score_report(const std::string& report_id, const std::string& mode, const std::string& report_text,
                       const std::string& source_transcript, ModelGateway& gateway,
                       const std::string& generator_model) {
  std::vector<std::future<int>> pending;
  for (EvalDimension d : kAllEvalDimensions) {
    pending.push_back(std::async(std::launch::async, [&, d] {
      return judge_dimension(report_text, source_transcript, d, gateway);
    }));
  }
  std::map<EvalDimension, int> scores;
  std::exception_ptr failure;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    try {
      scores[kAllEvalDimensions[i]] = pending[i].get();
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return make_scorecard(report_id, mode, std::move(scores), gateway.chat_model_id(), generator_model);
}

const ModeSummary& ModeComparison::summary(std::string_view mode) const {
  for (const auto& m : modes) {
    if (m.mode == mode) return m;
  }
  throw Error(ErrorCode::kMissingMode, "mode " + std::string(mode) + " not in comparison");
}

ModeComparison compare_modes(const std::vector<Scorecard>& cards, const std::vector<std::string>& modes,
                             const std::string& baseline, const std::string& target) {
  std::vector<std::string> wanted = modes;
  for (const auto& m : {baseline, target}) {
    if (std::find(wanted.begin(), wanted.end(), m) == wanted.end()) wanted.push_back(m);
  }
  ModeComparison out;
  out.baseline = baseline;
  out.target = target;
  for (const auto& mode : wanted) {
    ModeSummary s;
    s.mode = mode;
    for (const auto& c : cards) {
      if (c.mode != mode) continue;
      ++s.reports;
      s.score_sum += c.total();
      s.score_count += c.scores.size();
    }
    if (s.reports == 0 || s.score_count == 0) {
      throw Error(ErrorCode::kMissingMode, "no scorecards for mode " + mode);
    }
    const long long n = static_cast<long long>(s.score_count);
    s.mean_centi = static_cast<int>((200 * s.score_sum + n) / (2 * n));
    out.modes.push_back(std::move(s));
  }
  out.improvement_centi = out.summary(target).mean_centi - out.summary(baseline).mean_centi;
  return out;
}

std::string format_centi(int centi) {
  char buf[32];
  const int a = std::abs(centi);
  std::snprintf(buf, sizeof(buf), "%s%d.%02d", centi < 0 ? "-" : "", a / 100, a % 100);
  return buf;
}

std::string format_improvement(int centi) { return (centi < 0 ? "" : "+") + format_centi(centi); }

std::string render_comparison_table(const std::vector<Scorecard>& cards, const std::vector<std::string>& modes,
                                    const std::string& baseline, const std::string& target) {
  std::vector<std::string> models;
  for (const auto& c : cards) {
    if (std::find(models.begin(), models.end(), c.generator_model) == models.end()) {
      models.push_back(c.generator_model);
    }
  }
  std::string out = "| Model |";
  for (const auto& m : modes) out += " " + m + " |";
  out += " Improvement |\n|---|";
  for (std::size_t i = 0; i < modes.size(); ++i) out += "---|";
  out += "---|\n";
  for (const auto& model : models) {
    std::vector<Scorecard> group;
    std::copy_if(cards.begin(), cards.end(), std::back_inserter(group),
                 [&](const Scorecard& c) { return c.generator_model == model; });
    const ModeComparison cmp = compare_modes(group, modes, baseline, target);
    out += "| " + (model.empty() ? std::string("(unspecified)") : model) + " |";
    for (const auto& m : modes) out += " " + format_centi(cmp.summary(m).mean_centi) + " |";
    out += " " + format_improvement(cmp.improvement_centi) + " |\n";
  }
  return out;
}

nlohmann::json scorecards_to_json(const std::vector<Scorecard>& cards) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cards) {
    nlohmann::json scores = nlohmann::json::object();
    for (EvalDimension d : kAllEvalDimensions) {
      if (auto it = c.scores.find(d); it != c.scores.end()) scores[std::string(dimension_name(d))] = it->second;
    }
    arr.push_back({{"report_id", c.report_id},
                   {"mode", c.mode},
                   {"judge_model", c.judge_model},
                   {"generator_model", c.generator_model},
                   {"scores", scores},
                   {"mean", c.mean}});
  }
  return arr;
}

std::vector<Scorecard> scorecards_from_json(const nlohmann::json& j) {
  std::vector<Scorecard> out;
  try {
    for (const auto& item : j) {
      std::map<EvalDimension, int> scores;
      for (const auto& [name, value] : item.at("scores").items()) {
        const auto d = parse_dimension_name(name);
        if (!d) throw Error(ErrorCode::kIoFailure, "unknown dimension " + name);
        scores[*d] = value.get<int>();
      }
      out.push_back(make_scorecard(item.at("report_id").get<std::string>(), item.at("mode").get<std::string>(),
                                   std::move(scores), item.value("judge_model", std::string()),
                                   item.value("generator_model", std::string())));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoFailure, std::string("malformed scorecards: ") + e.what());
  }
  return out;
}

}  // namespace findebate
