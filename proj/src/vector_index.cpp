#include "findebate/vector_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "findebate/error.hpp"
#include "findebate/hashing.hpp"
#include "findebate/transcript.hpp"

namespace findebate {
namespace {

constexpr char kMagic[4] = {'F', 'D', 'I', 'X'};
constexpr std::size_t kDigestLen = 64;

static_assert(std::endian::native == std::endian::little, "index files are little-endian");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void f32(float v) { bytes(&v, 4); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  void bytes(void* p, std::size_t n) {
    if (n > data_.size() - pos_) throw Error(ErrorCode::kIoFailure, "index file is truncated");
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, 8);
    return v;
  }
  float f32() {
    float v;
    bytes(&v, 4);
    return v;
  }
  std::string str() {
    const std::uint64_t n = u64();
    if (n > data_.size() - pos_) throw Error(ErrorCode::kIoFailure, "index file is truncated");
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

VectorIndex::VectorIndex(std::size_t dim, std::string model_id) : dim_(dim), model_id_(std::move(model_id)) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidConfig, "index dim must be positive");
}

std::size_t VectorIndex::add(const std::vector<EmbeddedChunk>& items) {
  std::string model = model_id_;
  std::unordered_set<std::string> batch_ids;
  for (const auto& item : items) {
    if (item.vector.dim() != dim_) {
      throw Error(ErrorCode::kDimMismatch, "vector for " + item.chunk.chunk_id + " has dim " +
                                               std::to_string(item.vector.dim()) + ", index dim is " +
                                               std::to_string(dim_));
    }
    if (model.empty()) model = item.vector.model_id;
    if (item.vector.model_id != model) {
      throw Error(ErrorCode::kDimMismatch,
                  "vector model '" + item.vector.model_id + "' does not match index model '" + model + "'");
    }
    for (float v : item.vector.values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kPreconditionViolation, "non-finite vector value");
    }
    if (by_id_.count(item.chunk.chunk_id) || !batch_ids.insert(item.chunk.chunk_id).second) {
      throw Error(ErrorCode::kDuplicateId, "chunk id " + item.chunk.chunk_id + " already indexed");
    }
  }

  model_id_ = model;
  for (const auto& item : items) {
    by_id_.emplace(item.chunk.chunk_id, chunks_.size());
    chunks_.push_back(item.chunk);
    double norm = 0.0;
    for (float v : item.vector.values) norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    for (float v : item.vector.values) {
      raw_.push_back(v);
      unit_.push_back(norm > 0.0 ? v / norm : 0.0);
    }
  }
  return items.size();
}

std::vector<double> VectorIndex::normalized_query(const EmbeddingVector& query) const {
  if (query.dim() != dim_) {
    throw Error(ErrorCode::kDimMismatch,
                "query dim " + std::to_string(query.dim()) + ", index dim " + std::to_string(dim_));
  }
  // Same width is not enough: vectors from another model live in another space.
  if (!model_id_.empty() && !query.model_id.empty() && query.model_id != model_id_) {
    throw Error(ErrorCode::kDimMismatch, "query from model '" + query.model_id + "', index holds '" + model_id_ + "'");
  }
  double norm = 0.0;
  for (float v : query.values) norm += static_cast<double>(v) * v;
  norm = std::sqrt(norm);
  std::vector<double> q(dim_, 0.0);
  if (norm > 0.0) {
    for (std::size_t i = 0; i < dim_; ++i) q[i] = query.values[i] / norm;
  }
  return q;
}

double VectorIndex::dot(std::size_t row, const std::vector<double>& q) const {
  const double* u = unit_.data() + row * dim_;
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += u[i] * q[i];
  return std::clamp(s, -1.0, 1.0);
}

std::vector<SearchHit> VectorIndex::search(const EmbeddingVector& query, std::size_t k) const {
  const auto q = normalized_query(query);
  if (chunks_.empty()) throw Error(ErrorCode::kEmptyIndex, "search on an empty index");

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(chunks_.size());
  for (std::size_t row = 0; row < chunks_.size(); ++row) scored.emplace_back(dot(row, q), row);
  const std::size_t n = std::min(k, scored.size());
  auto before = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return chunks_[a.second].chunk_id < chunks_[b.second].chunk_id;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), before);

  std::vector<SearchHit> hits;
  hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Chunk& c = chunks_[scored[i].second];
    hits.push_back(SearchHit{c.chunk_id, scored[i].first, c});
  }
  return hits;
}

std::optional<double> VectorIndex::score(const std::string& chunk_id, const EmbeddingVector& query) const {
  const auto it = by_id_.find(chunk_id);
  if (it == by_id_.end()) return std::nullopt;
  return dot(it->second, normalized_query(query));
}

const Chunk* VectorIndex::find(const std::string& chunk_id) const {
  const auto it = by_id_.find(chunk_id);
  return it == by_id_.end() ? nullptr : &chunks_[it->second];
}

// Layout (little-endian):
//   "FDIX" u32 version  u32 dim  u64 count  str model_id
//   count * dim float32
//   count * { str chunk_id, str doc_id, u64 start, u64 end, u8 kind,
//             str section_heading, str speaker, str text }
//   64 hex chars: SHA-256 of everything before
// where str is a u64 length followed by the bytes.
void VectorIndex::persist(const std::filesystem::path& path) const {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(dim_));
  w.u64(chunks_.size());
  w.str(model_id_);
  for (float v : raw_) w.f32(v);
  for (const auto& c : chunks_) {
    w.str(c.chunk_id);
    w.str(c.doc_id);
    w.u64(c.span.start);
    w.u64(c.span.end);
    w.u8(static_cast<std::uint8_t>(c.boundary_kind));
    w.str(c.section_heading);
    w.str(c.speaker);
    w.str(c.text);
  }
  const std::string digest = sha256_hex(w.buffer());
  w.bytes(digest.data(), digest.size());

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + tmp.string());
    out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
    if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot rename index into place: " + ec.message());
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  if (data.size() < sizeof(kMagic) || std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kFormatVersionMismatch, path.string() + " is not an index file");
  }
  Reader header(std::string_view(data).substr(sizeof(kMagic)));
  const std::uint32_t version = header.u32();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kFormatVersionMismatch,
                "index format version " + std::to_string(version) + " is not supported");
  }
  if (data.size() < sizeof(kMagic) + kDigestLen) throw Error(ErrorCode::kIoFailure, "index file is truncated");
  const std::string_view body = std::string_view(data).substr(0, data.size() - kDigestLen);
  if (sha256_hex(body) != std::string_view(data).substr(body.size())) {
    throw Error(ErrorCode::kIoFailure, path.string() + " failed its checksum");
  }

  Reader r(body.substr(sizeof(kMagic) + 4));
  const std::uint32_t dim = r.u32();
  const std::uint64_t count = r.u64();
  std::string model_id = r.str();
  if (dim == 0) throw Error(ErrorCode::kIoFailure, "index file has dim 0");
  if (count > body.size() / (4ULL * dim)) throw Error(ErrorCode::kIoFailure, "index file count is implausible");

  std::vector<EmbeddedChunk> items(count);
  for (auto& item : items) {
    item.vector.model_id = model_id;
    item.vector.values.resize(dim);
    for (auto& v : item.vector.values) v = r.f32();
  }
  for (auto& item : items) {
    Chunk& c = item.chunk;
    c.chunk_id = r.str();
    c.doc_id = r.str();
    c.span.start = r.u64();
    c.span.end = r.u64();
    const std::uint8_t kind = r.u8();
    if (kind > static_cast<std::uint8_t>(BoundaryKind::kToken)) {
      throw Error(ErrorCode::kIoFailure, "index file has an unknown boundary kind");
    }
    c.boundary_kind = static_cast<BoundaryKind>(kind);
    c.section_heading = r.str();
    c.speaker = r.str();
    c.text = r.str();
  }
  if (!r.done()) throw Error(ErrorCode::kIoFailure, "index file has trailing bytes");

  VectorIndex index(dim, std::move(model_id));
  try {
    index.add(items);
  } catch (const Error& e) {
    throw Error(ErrorCode::kIoFailure, std::string("index file is inconsistent: ") + e.what());
  }
  return index;
}

}  // namespace findebate
