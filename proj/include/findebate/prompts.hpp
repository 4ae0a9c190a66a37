#pragma once

// Role prompts sent verbatim as system messages.

#include <string_view>

namespace findebate::prompts {

extern const std::string_view kEarningsAnalystSystem;
extern const std::string_view kMarketPredictorSystem;
extern const std::string_view kSentimentAnalystSystem;
extern const std::string_view kValuationAnalystSystem;
extern const std::string_view kRiskAnalystSystem;
extern const std::string_view kSynthesizerSystem;
extern const std::string_view kTrustSystem;
extern const std::string_view kSkepticSystem;
extern const std::string_view kLeaderSystem;
extern const std::string_view kKeyPointsCoverageRubric;
extern const std::string_view kFactualAccuracyRubric;

}  // namespace findebate::prompts
