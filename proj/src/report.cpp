#include "findebate/report.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace findebate {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Line with emphasis markers, heading hashes, quote markers and bullets removed.
std::string plain_line(std::string_view line) {
  std::string s;
  s.reserve(line.size());
  for (char c : line) {
    if (c != '*' && c != '`') s.push_back(c);
  }
  std::string_view v = trim(s);
  while (!v.empty() && (v.front() == '#' || v.front() == '>')) v.remove_prefix(1);
  v = trim(v);
  if (v.size() >= 2 && (v[0] == '-' || v[0] == '+') && is_space(v[1])) v = trim(v.substr(2));
  return std::string(v);
}

std::size_t word_count(std::string_view s) {
  std::size_t n = 0;
  bool in = false;
  for (char c : s) {
    if (is_space(c)) {
      in = false;
    } else if (!in) {
      in = true;
      ++n;
    }
  }
  return n;
}

// Value after "<label>:" when the line starts with the label (case-insensitive).
std::optional<std::string_view> labeled_value(std::string_view plain, std::string_view label) {
  if (plain.size() < label.size()) return std::nullopt;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(plain[i])) != label[i]) return std::nullopt;
  }
  std::string_view rest = plain.substr(label.size());
  while (!rest.empty() && is_space(rest.front())) rest.remove_prefix(1);
  if (rest.empty() || rest.front() != ':') return std::nullopt;
  return trim(rest.substr(1));
}

std::optional<Timeframe> header_timeframe(std::string_view plain) {
  if (plain.empty() || word_count(plain) > 8) return std::nullopt;
  if (labeled_value(plain, "position") || labeled_value(plain, "conviction") ||
      labeled_value(plain, "rationale")) {
    return std::nullopt;
  }
  const std::string low = lower(plain);
  static constexpr std::pair<std::string_view, Timeframe> kTokens[] = {
      {"1-day", Timeframe::kOneDay}, {"1-week", Timeframe::kOneWeek}, {"1-month", Timeframe::kOneMonth}};
  std::optional<std::pair<std::size_t, Timeframe>> best;
  for (const auto& [token, tf] : kTokens) {
    for (std::size_t at = low.find(token); at != std::string::npos; at = low.find(token, at + 1)) {
      const bool left_ok = at == 0 || !std::isdigit(static_cast<unsigned char>(low[at - 1]));
      const std::size_t after = at + token.size();
      const bool right_ok = after >= low.size() || !std::isalpha(static_cast<unsigned char>(low[after]));
      if (left_ok && right_ok) {
        if (!best || at < best->first) best = std::make_pair(at, tf);
        break;
      }
    }
  }
  if (!best) return std::nullopt;
  return best->second;
}

std::optional<Position> position_value(std::string_view plain) {
  auto value = labeled_value(plain, "position");
  if (!value) return std::nullopt;
  std::string_view v = *value;
  if (!v.empty() && v.front() == '[') v.remove_prefix(1);
  static constexpr std::pair<std::string_view, Position> kTokens[] = {
      {"LONG", Position::kLong}, {"SHORT", Position::kShort}, {"NEUTRAL", Position::kNeutral}};
  for (const auto& [token, pos] : kTokens) {
    if (!v.starts_with(token)) continue;
    if (v.size() == token.size()) return pos;
    const char next = v[token.size()];
    if (!is_alnum(next) && next != '/' && next != '_') return pos;
  }
  return std::nullopt;
}

// nullopt when the line is not a conviction line; an inner nullopt when it is
// one but carries no single integer percentage.
std::optional<std::optional<int>> conviction_value(std::string_view plain) {
  auto value = labeled_value(plain, "conviction");
  if (!value) return std::nullopt;
  std::string_view v = *value;
  if (!v.empty() && v.front() == '[') v.remove_prefix(1);
  std::size_t i = 0;
  int n = 0;
  while (i < v.size() && i < 4 && std::isdigit(static_cast<unsigned char>(v[i]))) {
    n = n * 10 + (v[i] - '0');
    ++i;
  }
  if (i == 0 || i > 3) return std::optional<int>{};
  std::size_t j = i;
  while (j < v.size() && is_space(v[j])) ++j;
  if (j < v.size() && v[j] == '%') ++j;
  if (j < v.size() && (std::isdigit(static_cast<unsigned char>(v[j])) || v[j] == '.' || v[j] == '-')) {
    if (!(v[j] == '.' && (j + 1 >= v.size() || !std::isdigit(static_cast<unsigned char>(v[j + 1]))))) {
      return std::optional<int>{};
    }
  }
  return std::optional<int>{n};
}

std::optional<std::string> heading_text(std::string_view line) {
  std::string_view t = trim(line);
  if (t.starts_with("#")) {
    std::string_view h = t;
    while (!h.empty() && h.front() == '#') h.remove_prefix(1);
    h = trim(h);
    if (!h.empty()) return plain_line(h);
    return std::nullopt;
  }
  if (t.size() > 4 && t.starts_with("**") && t.ends_with("**")) {
    std::string_view inner = trim(t.substr(2, t.size() - 4));
    if (!inner.empty() && inner.find("**") == std::string_view::npos) return std::string(inner);
  }
  return std::nullopt;
}

std::string excerpt(const std::vector<std::string>& lines) {
  std::string joined;
  for (const auto& l : lines) {
    if (!joined.empty()) joined.push_back(' ');
    joined += l;
  }
  std::string collapsed;
  bool pending = false;
  for (char c : joined) {
    if (is_space(c)) {
      pending = !collapsed.empty();
    } else {
      if (pending) collapsed.push_back(' ');
      pending = false;
      collapsed.push_back(c);
    }
  }
  constexpr std::size_t kMax = 240;
  if (collapsed.size() <= kMax) return collapsed;
  std::size_t cut = collapsed.rfind(' ', kMax);
  if (cut == std::string::npos || cut == 0) {
    cut = kMax;
    while (cut > 0 && (static_cast<unsigned char>(collapsed[cut]) & 0xC0) == 0x80) --cut;
  }
  return collapsed.substr(0, cut);
}

struct Scope {
  Timeframe timeframe;
  std::optional<Position> position;
  std::optional<int> conviction;
  bool conviction_seen = false;
  std::vector<std::string> rationale;
};

}  // namespace

std::string_view timeframe_name(Timeframe t) {
  switch (t) {
    case Timeframe::kOneDay: return "1-day";
    case Timeframe::kOneWeek: return "1-week";
    case Timeframe::kOneMonth: return "1-month";
  }
  return "unknown";
}

std::string_view position_name(Position p) {
  switch (p) {
    case Position::kLong: return "LONG";
    case Position::kShort: return "SHORT";
    case Position::kNeutral: return "NEUTRAL";
  }
  return "UNKNOWN";
}

std::optional<Timeframe> parse_timeframe_name(std::string_view s) {
  for (Timeframe t : kAllTimeframes) {
    if (timeframe_name(t) == s) return t;
  }
  return std::nullopt;
}

std::optional<Position> parse_position_name(std::string_view s) {
  const std::string up = [&] {
    std::string u(s);
    for (char& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return u;
  }();
  for (Position p : {Position::kLong, Position::kShort, Position::kNeutral}) {
    if (position_name(p) == up) return p;
  }
  return std::nullopt;
}

std::string_view stance_change_name(StanceChange c) {
  switch (c) {
    case StanceChange::kUnchanged: return "Unchanged";
    case StanceChange::kDirectionFlipped: return "DirectionFlipped";
    case StanceChange::kRemoved: return "Removed";
    case StanceChange::kAdded: return "Added";
  }
  return "Unknown";
}

const Recommendation* StructuredReport::find(Timeframe t) const {
  for (const auto& r : recommendations) {
    if (r.timeframe == t) return &r;
  }
  return nullptr;
}

StructuredReport parse_report(std::string_view text) {
  StructuredReport out;
  out.markdown = std::string(text);
  std::optional<Scope> scope;

  auto close_scope = [&] {
    if (scope && scope->position && !out.find(scope->timeframe)) {
      out.recommendations.push_back(
          Recommendation{scope->timeframe, *scope->position, scope->conviction, excerpt(scope->rationale)});
    }
    scope.reset();
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;

    const std::string plain = plain_line(line);
    if (plain.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    const auto tf = header_timeframe(plain);
    if (auto h = heading_text(line)) {
      out.section_headings.push_back(*h);
    } else if (tf) {
      out.section_headings.push_back(plain);
    }
    if (tf) {
      close_scope();
      scope = Scope{*tf, std::nullopt, std::nullopt, false, {}};
    } else if (scope) {
      if (auto p = position_value(plain)) {
        if (!scope->position) scope->position = p;
      } else if (auto c = conviction_value(plain)) {
        if (!scope->conviction_seen) {
          scope->conviction_seen = true;
          scope->conviction = *c;
        }
      } else if (auto r = labeled_value(plain, "rationale")) {
        scope->rationale.emplace_back(*r);
      } else if (!labeled_value(plain, "position")) {
        scope->rationale.push_back(plain);
      }
    }
    if (eol == text.size()) break;
  }
  close_scope();

  std::sort(out.recommendations.begin(), out.recommendations.end(),
            [](const Recommendation& a, const Recommendation& b) { return a.timeframe < b.timeframe; });
  return out;
}

bool has_recommendations(const StructuredReport& report) {
  return std::all_of(kAllTimeframes.begin(), kAllTimeframes.end(),
                     [&](Timeframe t) { return report.find(t) != nullptr; });
}

StanceDiff stance_diff(const StructuredReport& before, const StructuredReport& after) {
  StanceDiff diff;
  for (Timeframe t : kAllTimeframes) {
    const Recommendation* b = before.find(t);
    const Recommendation* a = after.find(t);
    if (!b && !a) continue;
    if (b && !a) {
      diff.per_timeframe[t] = StanceChange::kRemoved;
    } else if (!b && a) {
      diff.per_timeframe[t] = StanceChange::kAdded;
    } else {
      diff.per_timeframe[t] =
          a->position == b->position ? StanceChange::kUnchanged : StanceChange::kDirectionFlipped;
      if (a->conviction_pct && b->conviction_pct) {
        diff.conviction_deltas[t] = *a->conviction_pct - *b->conviction_pct;
      }
    }
  }
  return diff;
}

bool core_compromised(const StructuredReport& before, const StructuredReport& after,
                      const SafetyThresholds& thresholds) {
  const StanceDiff diff = stance_diff(before, after);
  for (const auto& [t, change] : diff.per_timeframe) {
    if (change == StanceChange::kDirectionFlipped || change == StanceChange::kRemoved) return true;
  }
  for (const auto& r : after.recommendations) {
    if (r.conviction_pct &&
        (*r.conviction_pct < thresholds.min_conviction || *r.conviction_pct > thresholds.max_conviction)) {
      return true;
    }
  }
  for (const auto& [t, delta] : diff.conviction_deltas) {
    if (std::abs(delta) > thresholds.max_conviction_delta) return true;
  }
  return false;
}

std::string render_recommendations(const std::vector<Recommendation>& recs) {
  std::string out;
  for (const auto& r : recs) {
    if (!out.empty()) out += "\n";
    switch (r.timeframe) {
      case Timeframe::kOneDay: out += "1-DAY TRADING RECOMMENDATION\n"; break;
      case Timeframe::kOneWeek: out += "1-WEEK MOMENTUM STRATEGY\n"; break;
      case Timeframe::kOneMonth: out += "1-MONTH FUNDAMENTAL POSITION\n"; break;
    }
    out += "Position: ";
    out += position_name(r.position);
    out += "\n";
    if (r.conviction_pct) out += "Conviction: " + std::to_string(*r.conviction_pct) + "%\n";
    if (!r.rationale_excerpt.empty()) out += "Rationale: " + r.rationale_excerpt + "\n";
  }
  return out;
}

}  // namespace findebate
