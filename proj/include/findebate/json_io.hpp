#pragma once

// nlohmann::json conversions for the records that are written to run artifacts.

#include <json.hpp>

#include "findebate/error.hpp"
#include "findebate/report.hpp"
#include "findebate/segmenter.hpp"

namespace findebate {

inline void to_json(nlohmann::json& j, const CharSpan& s) { j = nlohmann::json::array({s.start, s.end}); }

inline void from_json(const nlohmann::json& j, CharSpan& s) {
  s.start = j.at(0).get<std::size_t>();
  s.end = j.at(1).get<std::size_t>();
}

inline void to_json(nlohmann::json& j, const Chunk& c) {
  j = nlohmann::json{{"chunk_id", c.chunk_id},
                     {"doc_id", c.doc_id},
                     {"span", c.span},
                     {"boundary_kind", boundary_kind_name(c.boundary_kind)},
                     {"section_heading", c.section_heading},
                     {"speaker", c.speaker},
                     {"text", c.text}};
}

inline void from_json(const nlohmann::json& j, Chunk& c) {
  c.chunk_id = j.at("chunk_id").get<std::string>();
  c.doc_id = j.at("doc_id").get<std::string>();
  c.span = j.at("span").get<CharSpan>();
  const auto kind = j.at("boundary_kind").get<std::string>();
  if (kind == "paragraph") {
    c.boundary_kind = BoundaryKind::kParagraph;
  } else if (kind == "sentence") {
    c.boundary_kind = BoundaryKind::kSentence;
  } else if (kind == "token") {
    c.boundary_kind = BoundaryKind::kToken;
  } else {
    throw Error(ErrorCode::kIoFailure, "unknown boundary kind '" + kind + "'");
  }
  c.section_heading = j.at("section_heading").get<std::string>();
  c.speaker = j.at("speaker").get<std::string>();
  c.text = j.at("text").get<std::string>();
}

// {timeframe, position, conviction_pct, rationale}; conviction_pct is null when absent.
inline void to_json(nlohmann::json& j, const Recommendation& r) {
  j = nlohmann::json{{"timeframe", timeframe_name(r.timeframe)},
                     {"position", position_name(r.position)},
                     {"conviction_pct", nullptr},
                     {"rationale", r.rationale_excerpt}};
  if (r.conviction_pct) j["conviction_pct"] = *r.conviction_pct;
}

inline void from_json(const nlohmann::json& j, Recommendation& r) {
  const auto tf = parse_timeframe_name(j.at("timeframe").get<std::string>());
  const auto pos = parse_position_name(j.at("position").get<std::string>());
  if (!tf || !pos) throw Error(ErrorCode::kIoFailure, "malformed recommendation record");
  r.timeframe = *tf;
  r.position = *pos;
  r.conviction_pct.reset();
  if (j.contains("conviction_pct") && !j.at("conviction_pct").is_null()) {
    r.conviction_pct = j.at("conviction_pct").get<int>();
  }
  r.rationale_excerpt = j.value("rationale", std::string());
}

}  // namespace findebate
