#include "findebate/retrieval.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>
#include <unordered_map>

#include "findebate/error.hpp"
#include "findebate/json_io.hpp"
#include "findebate/transcript.hpp"

namespace findebate {
namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

bool hit_before(const SearchHit& a, const SearchHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.chunk_id < b.chunk_id;
}

DimensionHits search_dimension(const VectorIndex& index, const QueryDimension& dim,
                               const std::vector<EmbeddingVector>& vectors, std::size_t k) {
  std::map<std::string, SearchHit> best;
  for (const auto& v : vectors) {
    for (auto& hit : index.search(v, k)) {
      auto [it, inserted] = best.try_emplace(hit.chunk_id, hit);
      if (!inserted && hit.score > it->second.score) it->second.score = hit.score;
    }
  }
  DimensionHits out{dim.name, {}};
  for (auto& [id, hit] : best) out.hits.push_back(std::move(hit));
  std::sort(out.hits.begin(), out.hits.end(), hit_before);
  if (out.hits.size() > k) out.hits.resize(k);
  return out;
}

}  // namespace

const std::vector<std::string>& query_dimension_names() {
  static const std::vector<std::string> kNames = {
      std::string(kGeneralFinancialPerformance), std::string(kSpecializedFinancialMetrics),
      std::string(kMarketSentimentRisk), std::string(kMultiQueryIntegration)};
  return kNames;
}

std::string_view dimension_display_name(std::string_view name) {
  if (name == kGeneralFinancialPerformance) return "General Financial Performance";
  if (name == kSpecializedFinancialMetrics) return "Specialized Financial Metrics";
  if (name == kMarketSentimentRisk) return "Market Sentiment & Risk";
  if (name == kMultiQueryIntegration) return "Multi-Query Integration";
  return name;
}

std::vector<QueryDimension> default_query_bank() {
  return {
      {std::string(kGeneralFinancialPerformance),
       {
           "Financial Performance, Revenue, Earnings, Beat/Miss, Surprise, Financial Results",
           "Guidance, Outlook, Forecast, Expectations, Future Performance, Strategic Direction",
           "Growth Trends, Margin Expansion, Profitability, Cash Flow, Competitive Position",
           "Catalysts, Opportunities, Product Launches, Market Expansion, Strategic Initiatives",
       }},
      {std::string(kSpecializedFinancialMetrics),
       {
           "Net Interest Margin (NIM), Loan Deposits, Credit Quality, Asset Quality",
           "Non-Performing Assets (NPAs), Charge-Offs, Provision Loan Losses, Problem Loans",
           "Return on Assets (ROA), Return on Equity (ROE), Efficiency Ratio, Capital Adequacy",
           "Regulatory Capital, Tier 1 Capital, Stress Testing, Compliance Requirements",
           "Deposit Growth, Loan Growth, Credit Demand, Funding Costs, Interest Rates",
       }},
      {std::string(kMarketSentimentRisk),
       {
           "Management Confidence, Sentiment, Optimistic, Cautious, Positive/Negative Tone",
           "Risks, Challenges, Concerns, Headwinds, Uncertainties, Market Conditions",
           "Analyst Questions, Investor Concerns, Market Reception, Stock Movement Factors",
           "Risk Management, Credit Risk, Operational Risk, Market Risk, Liquidity Risk",
       }},
      {std::string(kMultiQueryIntegration),
       {
           "Short-Term, Immediate, Near-Term, Weekly, Monthly, Quarterly Timeline Events",
           "Cross-Functional Analysis, Comparative Performance, Benchmarking Trends",
           "Integrated Reporting, Comprehensive Assessment, Multi-Dimensional Evaluation",
           "Temporal Correlation, Sequential Analysis, Longitudinal Performance Tracking",
       }},
  };
}

std::vector<QueryDimension> validate_query_bank(std::vector<QueryDimension> bank) {
  std::vector<QueryDimension> ordered;
  for (const auto& name : query_dimension_names()) {
    auto count = std::count_if(bank.begin(), bank.end(), [&](const QueryDimension& d) { return d.name == name; });
    if (count != 1) {
      throw Error(ErrorCode::kInvalidConfig, "query bank must list dimension " + name + " exactly once");
    }
    auto it = std::find_if(bank.begin(), bank.end(), [&](const QueryDimension& d) { return d.name == name; });
    if (it->queries.empty()) throw Error(ErrorCode::kInvalidConfig, "dimension " + name + " has no queries");
    for (const auto& q : it->queries) {
      if (blank(q)) throw Error(ErrorCode::kInvalidConfig, "dimension " + name + " has a blank query");
    }
    ordered.push_back(std::move(*it));
  }
  if (bank.size() != ordered.size()) throw Error(ErrorCode::kInvalidConfig, "query bank has unknown dimensions");
  return ordered;
}

std::vector<QueryDimension> load_query_bank(const std::filesystem::path& path) {
  std::vector<QueryDimension> bank;
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    for (const auto& d : j.at("dimensions")) {
      bank.push_back(QueryDimension{d.at("name").get<std::string>(), d.at("queries").get<std::vector<std::string>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, "malformed query bank " + path.string() + ": " + e.what());
  }
  return validate_query_bank(std::move(bank));
}

const DimensionHits* EvidenceBundle::dimension(std::string_view name) const {
  for (const auto& d : per_dimension) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

EvidenceBundle retrieve_evidence(const VectorIndex& index, const std::vector<QueryDimension>& bank,
                                 ModelGateway& gateway, std::size_t k_per_dimension) {
  if (k_per_dimension == 0) throw Error(ErrorCode::kInvalidConfig, "k_per_dimension must be positive");
  if (index.size() == 0) throw Error(ErrorCode::kEmptyBundle, "cannot retrieve evidence from an empty index");
  const auto dims = validate_query_bank(bank);

  std::vector<std::future<std::pair<std::vector<EmbeddingVector>, DimensionHits>>> pending;
  for (const auto& dim : dims) {
    pending.push_back(std::async(std::launch::async, [&index, &gateway, &dim, k_per_dimension] {
      auto vectors = gateway.embed_all(dim.queries);
      auto hits = search_dimension(index, dim, vectors, k_per_dimension);
      return std::make_pair(std::move(vectors), std::move(hits));
    }));
  }

  EvidenceBundle bundle;
  bundle.doc_id = index.chunks().front().doc_id;
  std::vector<EmbeddingVector> all_queries;
  for (auto& f : pending) {
    auto [vectors, hits] = f.get();
    for (auto& v : vectors) all_queries.push_back(std::move(v));
    bundle.per_dimension.push_back(std::move(hits));
  }

  std::set<std::string> seen;
  for (const auto& dim : bundle.per_dimension) {
    for (const auto& hit : dim.hits) {
      if (!seen.insert(hit.chunk_id).second) continue;
      double best = -2.0;
      for (const auto& q : all_queries) best = std::max(best, *index.score(hit.chunk_id, q));
      bundle.flattened.push_back(SearchHit{hit.chunk_id, best, hit.chunk});
    }
  }
  std::sort(bundle.flattened.begin(), bundle.flattened.end(), hit_before);
  return bundle;
}

std::string render_evidence(const EvidenceBundle& bundle, std::size_t budget_tokens) {
  std::set<std::string> admitted;
  std::set<std::string> rejected;
  std::size_t used = 0;
  std::size_t max_rank = 0;
  for (const auto& d : bundle.per_dimension) max_rank = std::max(max_rank, d.hits.size());
  for (std::size_t rank = 0; rank < max_rank; ++rank) {
    for (const auto& d : bundle.per_dimension) {
      if (rank >= d.hits.size()) continue;
      const SearchHit& hit = d.hits[rank];
      if (admitted.count(hit.chunk_id) || rejected.count(hit.chunk_id)) continue;
      const std::size_t cost = token_estimate(hit.chunk.text);
      if (used + cost <= budget_tokens) {
        used += cost;
        admitted.insert(hit.chunk_id);
      } else {
        rejected.insert(hit.chunk_id);
      }
    }
  }

  std::string out;
  std::set<std::string> printed;
  for (const auto& d : bundle.per_dimension) {
    if (!out.empty()) out += "\n";
    out += "## ";
    out += dimension_display_name(d.name);
    out += "\n";
    for (const auto& hit : d.hits) {
      if (!admitted.count(hit.chunk_id)) continue;
      out += "[" + hit.chunk_id + "]";
      if (!printed.insert(hit.chunk_id).second) {
        out += " (see above)\n";
        continue;
      }
      out += " " + hit.chunk.speaker;
      if (!hit.chunk.section_heading.empty()) out += " (" + hit.chunk.section_heading + ")";
      out += ": " + collapse_whitespace(hit.chunk.text) + "\n";
    }
  }
  if (!rejected.empty()) {
    out += "\n";
    out += kEvidenceTruncatedMarker;
    out += "\n";
  }
  return out;
}

nlohmann::json evidence_to_json(const EvidenceBundle& bundle) {
  auto hit_json = [](const SearchHit& h) {
    return nlohmann::json{{"chunk_id", h.chunk_id}, {"score", h.score}, {"speaker", h.chunk.speaker},
                          {"section_heading", h.chunk.section_heading}};
  };
  nlohmann::json j;
  j["doc_id"] = bundle.doc_id;
  j["per_dimension"] = nlohmann::json::array();
  for (const auto& d : bundle.per_dimension) {
    nlohmann::json hits = nlohmann::json::array();
    for (const auto& h : d.hits) hits.push_back(hit_json(h));
    j["per_dimension"].push_back({{"name", d.name}, {"hits", hits}});
  }
  j["flattened"] = nlohmann::json::array();
  for (const auto& h : bundle.flattened) j["flattened"].push_back(hit_json(h));
  return j;
}

}  // namespace findebate
