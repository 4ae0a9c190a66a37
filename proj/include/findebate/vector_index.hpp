#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "findebate/gateway.hpp"
#include "findebate/segmenter.hpp"

namespace findebate {

struct EmbeddedChunk {
  Chunk chunk;
  EmbeddingVector vector;
};

struct SearchHit {
  std::string chunk_id;
  double score = 0.0;  // cosine similarity
  Chunk chunk;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

/// Exact cosine index. Raw float32 vectors are kept for persistence; scoring
/// uses L2-normalized double copies, so search is a dot product per item.
///
/// Concurrent const calls are safe; add() must not overlap with anything else.
class VectorIndex {
 public:
  /// An empty model_id adopts the model id of the first added vector.
  explicit VectorIndex(std::size_t dim, std::string model_id = {});

  /// All-or-nothing. Throws kDimMismatch (wrong dim or model id) or
  /// kDuplicateId (id already stored or repeated within the batch).
  std::size_t add(const std::vector<EmbeddedChunk>& items);

  /// min(k, size()) hits by descending score, ties by ascending chunk_id.
  /// Throws kDimMismatch (wrong dim or model id) or kEmptyIndex.
  std::vector<SearchHit> search(const EmbeddingVector& query, std::size_t k) const;

  /// Cosine of one stored chunk against the query, if the id is present.
  std::optional<double> score(const std::string& chunk_id, const EmbeddingVector& query) const;

  /// Writes atomically (temp file + rename). Identical content gives identical bytes.
  void persist(const std::filesystem::path& path) const;

  /// Throws kFormatVersionMismatch for a foreign or newer file and kIoFailure
  /// for unreadable, truncated or checksum-failing files.
  static VectorIndex load(const std::filesystem::path& path);

  std::size_t size() const noexcept { return chunks_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& model_id() const noexcept { return model_id_; }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
  const Chunk* find(const std::string& chunk_id) const;

  static constexpr std::uint32_t kFormatVersion = 1;

 private:
  std::vector<double> normalized_query(const EmbeddingVector& query) const;
  double dot(std::size_t row, const std::vector<double>& q) const;

  std::size_t dim_;
  std::string model_id_;
  std::vector<Chunk> chunks_;
  std::vector<float> raw_;         // size() * dim_
  std::vector<double> unit_;       // size() * dim_
  std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace findebate
