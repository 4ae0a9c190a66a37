#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace findebate {

enum class Timeframe { kOneDay, kOneWeek, kOneMonth };
enum class Position { kLong, kShort, kNeutral };

inline constexpr std::array<Timeframe, 3> kAllTimeframes = {Timeframe::kOneDay, Timeframe::kOneWeek,
                                                            Timeframe::kOneMonth};

std::string_view timeframe_name(Timeframe t);   // "1-day", "1-week", "1-month"
std::string_view position_name(Position p);     // "LONG", "SHORT", "NEUTRAL"
std::optional<Timeframe> parse_timeframe_name(std::string_view s);
std::optional<Position> parse_position_name(std::string_view s);

struct Recommendation {
  Timeframe timeframe = Timeframe::kOneDay;
  Position position = Position::kNeutral;
  // As written in the report. Range validity is judged by core_compromised, so an
  // out-of-range value written by a model is kept rather than silently dropped.
  std::optional<int> conviction_pct;
  std::string rationale_excerpt;

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

struct StructuredReport {
  std::string markdown;
  std::vector<Recommendation> recommendations;  // sorted by timeframe, at most one each
  std::vector<std::string> section_headings;    // document order

  const Recommendation* find(Timeframe t) const;
};

enum class StanceChange { kUnchanged, kDirectionFlipped, kRemoved, kAdded };

std::string_view stance_change_name(StanceChange c);

struct StanceDiff {
  std::map<Timeframe, StanceChange> per_timeframe;
  std::map<Timeframe, int> conviction_deltas;  // only where both sides carry a conviction
};

struct SafetyThresholds {
  int min_conviction = 50;
  int max_conviction = 95;
  int max_conviction_delta = 15;
};

/// Total over all strings; never throws.
///
/// A timeframe header is a short line (at most 8 words once markdown decoration
/// is stripped) containing "1-DAY", "1-WEEK" or "1-MONTH" in any case. Its scope
/// runs to the next timeframe header. Inside a scope the first
/// `Position: LONG|SHORT|NEUTRAL` line (exact upper-case token) and an optional
/// `Conviction: NN%` line form the recommendation. Scopes without a valid
/// position are skipped; for repeated timeframes the first valid scope wins.
StructuredReport parse_report(std::string_view text);

/// True iff all three timeframes carry a valid position.
bool has_recommendations(const StructuredReport& report);

StanceDiff stance_diff(const StructuredReport& before, const StructuredReport& after);

/// True iff any timeframe of `before` is flipped or removed in `after`, any
/// conviction in `after` lies outside [min, max], or any conviction moved by
/// more than max_conviction_delta points.
bool core_compromised(const StructuredReport& before, const StructuredReport& after,
                      const SafetyThresholds& thresholds = {});

/// Canonical writer for the recommendation grammar:
///
///     1-DAY TRADING RECOMMENDATION
///     Position: LONG
///     Conviction: 78%
std::string render_recommendations(const std::vector<Recommendation>& recs);

/// Delimiters around the report body inside debate prompts.
inline constexpr std::string_view kReportBlockOpen = "<<<REPORT";
inline constexpr std::string_view kReportBlockClose = "REPORT>>>";

}  // namespace findebate
