#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "findebate/gateway.hpp"
#include "findebate/vector_index.hpp"

namespace findebate {

inline constexpr std::string_view kGeneralFinancialPerformance = "GeneralFinancialPerformance";
inline constexpr std::string_view kSpecializedFinancialMetrics = "SpecializedFinancialMetrics";
inline constexpr std::string_view kMarketSentimentRisk = "MarketSentimentRisk";
inline constexpr std::string_view kMultiQueryIntegration = "MultiQueryIntegration";

/// The four dimension names in canonical order.
const std::vector<std::string>& query_dimension_names();

/// "Market Sentiment & Risk" for "MarketSentimentRisk", etc.
std::string_view dimension_display_name(std::string_view name);

struct QueryDimension {
  std::string name;
  std::vector<std::string> queries;
};

/// Banking-oriented bank: one query per sub-heading, holding that sub-heading's
/// comma-separated phrases.
std::vector<QueryDimension> default_query_bank();

/// Throws kInvalidConfig unless the bank holds exactly the four dimensions, each
/// once, each with at least one non-blank query. Returns them in canonical order.
std::vector<QueryDimension> validate_query_bank(std::vector<QueryDimension> bank);

/// Reads {"dimensions": [{"name": "...", "queries": ["...", ...]}, ...]}.
std::vector<QueryDimension> load_query_bank(const std::filesystem::path& path);

struct DimensionHits {
  std::string name;
  std::vector<SearchHit> hits;
};

struct EvidenceBundle {
  std::string doc_id;
  std::vector<DimensionHits> per_dimension;  // canonical dimension order
  std::vector<SearchHit> flattened;          // one entry per chunk, best score over every query

  const DimensionHits* dimension(std::string_view name) const;
};

inline constexpr std::size_t kDefaultKPerDimension = 8;
inline constexpr std::size_t kDefaultEvidenceBudget = 3000;

/// Per dimension: embed its queries, search each with k, keep each chunk's best
/// score, and cut to the top k. The flattened list is the union of those lists,
/// each chunk carrying its maximum cosine over all queries of the bank, ordered
/// by score then chunk_id. Dimensions are searched concurrently.
///
/// Throws kEmptyBundle for an empty index; gateway and index errors propagate.
EvidenceBundle retrieve_evidence(const VectorIndex& index, const std::vector<QueryDimension>& bank,
                                 ModelGateway& gateway, std::size_t k_per_dimension = kDefaultKPerDimension);

/// Plain-text evidence block, one "## <Dimension>" section each, hits as
///
///     [chunk_id] speaker (section): text
///
/// Chunks are admitted round-robin by rank across dimensions while the summed
/// token_estimate of their texts stays within budget; a chunk that does not fit
/// is left out whole. A chunk listed under several dimensions is printed in
/// full once and as "[chunk_id] (see above)" afterwards. If anything was left
/// out the block ends with "[evidence truncated]".
std::string render_evidence(const EvidenceBundle& bundle, std::size_t budget_tokens = kDefaultEvidenceBudget);

inline constexpr std::string_view kEvidenceTruncatedMarker = "[evidence truncated]";

nlohmann::json evidence_to_json(const EvidenceBundle& bundle);

}  // namespace findebate
