#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "findebate/gateway.hpp"

namespace findebate {

enum class EvalDimension {
  kReadability,
  kLanguageAbstractness,
  kCoherence,
  kFinancialKeyPointsCoverage,
  kBackgroundContextAdequacy,
  kManagementSentimentConveyance,
  kFutureOutlookAnalysis,
  kFactualAccuracy,
};

inline constexpr std::array<EvalDimension, 8> kAllEvalDimensions = {
    EvalDimension::kReadability,
    EvalDimension::kLanguageAbstractness,
    EvalDimension::kCoherence,
    EvalDimension::kFinancialKeyPointsCoverage,
    EvalDimension::kBackgroundContextAdequacy,
    EvalDimension::kManagementSentimentConveyance,
    EvalDimension::kFutureOutlookAnalysis,
    EvalDimension::kFactualAccuracy,
};

/// "Readability", "LanguageAbstractness", ...
std::string_view dimension_name(EvalDimension d);
/// "Readability", "Language Abstractness", ...
std::string_view dimension_title(EvalDimension d);
std::string_view dimension_definition(EvalDimension d);
std::optional<EvalDimension> parse_dimension_name(std::string_view s);

/// Instructions, criterion and the four labels for one dimension.
std::string rubric_prompt(EvalDimension d);

inline constexpr std::string_view kStrictVerdictInstruction = "Reply with a single digit 1-4.";

/// First standalone integer in 1..4 (decimals such as "3.5" do not count).
std::optional<int> parse_verdict(std::string_view reply);

/// One call with the dimension rubric as system prompt and the report plus
/// transcript as user prompt; one stricter retry on an unusable reply, then
/// kUnparseableVerdict.
int judge_dimension(const std::string& report_text, const std::string& source_transcript, EvalDimension dim,
                    ModelGateway& gateway);

struct Scorecard {
  std::string report_id;
  std::string mode;
  std::map<EvalDimension, int> scores;
  double mean = 0.0;
  std::string judge_model;
  std::string generator_model;  // groups rows in comparison tables; may be empty

  int total() const;
};

/// All eight dimensions judged concurrently; any failure fails the whole card.
Scorecard score_report(const std::string& report_id, const std::string& mode, const std::string& report_text,
                       const std::string& source_transcript, ModelGateway& gateway,
                       const std::string& generator_model = {});

/// Validates completeness and the 1..4 range and recomputes the mean.
Scorecard make_scorecard(std::string report_id, std::string mode, std::map<EvalDimension, int> scores,
                         std::string judge_model, std::string generator_model = {});

struct ModeSummary {
  std::string mode;
  std::size_t reports = 0;
  long long score_sum = 0;
  std::size_t score_count = 0;
  int mean_centi = 0;  // mean in hundredths, rounded half up
};

struct ModeComparison {
  std::vector<ModeSummary> modes;  // in requested order
  std::string baseline;
  std::string target;
  int improvement_centi = 0;

  const ModeSummary& summary(std::string_view mode) const;
};

/// Per-mode means from the stored integer scores with one division each,
/// rounded to two decimals; improvement is target minus baseline of those
/// rounded means. Throws kMissingMode if a requested mode has no scorecards.
ModeComparison compare_modes(const std::vector<Scorecard>& cards, const std::vector<std::string>& modes,
                             const std::string& baseline = "zero_shot", const std::string& target = "findebate");

/// "3.58"
std::string format_centi(int centi);
/// "+0.61", "-0.05", "+0.00"
std::string format_improvement(int centi);

/// One row per generator model: mode means followed by the improvement.
std::string render_comparison_table(const std::vector<Scorecard>& cards, const std::vector<std::string>& modes,
                                    const std::string& baseline = "zero_shot",
                                    const std::string& target = "findebate");

nlohmann::json scorecards_to_json(const std::vector<Scorecard>& cards);
std::vector<Scorecard> scorecards_from_json(const nlohmann::json& j);

}  // namespace findebate
