#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "findebate/error.hpp"
#include "findebate/vector_index.hpp"
#include "test_util.hpp"

using namespace findebate;

namespace {

EmbeddedChunk item(const std::string& id, std::vector<float> v, const std::string& model = "m") {
  Chunk c;
  c.chunk_id = id;
  c.doc_id = "doc";
  c.text = "text of " + id;
  c.speaker = "CEO";
  c.section_heading = "Q&A";
  c.span = {1, 5};
  c.boundary_kind = BoundaryKind::kSentence;
  return {c, EmbeddingVector{std::move(v), model}};
}

EmbeddingVector vec(std::vector<float> v, const std::string& model = "m") { return {std::move(v), model}; }

std::vector<float> random_vec(std::mt19937& rng, std::size_t dim) {
  std::normal_distribution<float> d;
  std::vector<float> v(dim);
  for (auto& x : v) x = d(rng);
  return v;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidConfig;
}

}  // namespace

TEST(VectorIndex, AddCounts) {
  VectorIndex idx(3);
  EXPECT_EQ(idx.add({item("a", {1, 0, 0}), item("b", {0, 1, 0}), item("c", {0, 0, 1})}), 3u);
  EXPECT_EQ(idx.size(), 3u);
  EXPECT_EQ(idx.model_id(), "m");
  ASSERT_NE(idx.find("b"), nullptr);
  EXPECT_EQ(idx.find("b")->text, "text of b");
  EXPECT_EQ(idx.find("z"), nullptr);
}

TEST(VectorIndex, DuplicateIdLeavesIndexUnchanged) {
  VectorIndex idx(3);
  idx.add({item("a", {1, 0, 0})});
  EXPECT_EQ(code_of([&] { idx.add({item("b", {0, 1, 0}), item("a", {0, 0, 1})}); }), ErrorCode::kDuplicateId);
  EXPECT_EQ(code_of([&] { idx.add({item("c", {0, 1, 0}), item("c", {0, 0, 1})}); }), ErrorCode::kDuplicateId);
  EXPECT_EQ(idx.size(), 1u);
  EXPECT_EQ(idx.find("b"), nullptr);
}

TEST(VectorIndex, DimAndModelMismatch) {
  VectorIndex idx(3);
  EXPECT_EQ(code_of([&] { idx.add({item("a", {1, 0})}); }), ErrorCode::kDimMismatch);
  idx.add({item("a", {1, 0, 0})});
  EXPECT_EQ(code_of([&] { idx.add({item("b", {1, 0, 0}, "other")}); }), ErrorCode::kDimMismatch);
  EXPECT_EQ(code_of([&] { idx.search(vec({1, 0}), 1); }), ErrorCode::kDimMismatch);
  EXPECT_EQ(code_of([&] { idx.search(vec({1, 0, 0}, "other"), 1); }), ErrorCode::kDimMismatch);
}

TEST(VectorIndex, EmptyIndexSearch) {
  VectorIndex idx(3);
  EXPECT_EQ(code_of([&] { idx.search(vec({1, 0, 0}), 1); }), ErrorCode::kEmptyIndex);
}

TEST(VectorIndex, IdentityQueryScoresOne) {
  VectorIndex idx(3);
  idx.add({item("a", {0.6f, 0.8f, 0}), item("b", {0, 1, 0}), item("c", {0, 0, 1})});
  const auto hits = idx.search(vec({0.6f, 0.8f, 0}), 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].chunk_id, "a");
  EXPECT_NEAR(hits[0].score, 1.0, 1e-6);
  EXPECT_EQ(hits[0].chunk.text, "text of a");
  EXPECT_EQ(idx.search(vec({1, 1, 1}), 10).size(), 3u);
}

TEST(VectorIndex, TiesBreakByChunkId) {
  VectorIndex idx(2);
  idx.add({item("b", {1, 0}), item("a", {2, 0}), item("c", {0, 1})});
  const auto hits = idx.search(vec({1, 0}), 3);
  EXPECT_EQ(hits[0].chunk_id, "a");
  EXPECT_EQ(hits[1].chunk_id, "b");
  EXPECT_EQ(hits[2].chunk_id, "c");
}

TEST(VectorIndex, MatchesExhaustiveScan) {
  std::mt19937 rng(7);
  VectorIndex idx(256);
  std::vector<EmbeddedChunk> items;
  for (int i = 0; i < 20; ++i) items.push_back(item("c" + std::to_string(i), random_vec(rng, 256)));
  idx.add(items);
  for (int q = 0; q < 5; ++q) {
    const auto query = vec(random_vec(rng, 256));
    std::vector<std::pair<double, std::string>> brute;
    for (const auto& it : items) {
      double dot = 0, na = 0, nb = 0;
      for (int d = 0; d < 256; ++d) {
        dot += double(it.vector.values[d]) * query.values[d];
        na += double(it.vector.values[d]) * it.vector.values[d];
        nb += double(query.values[d]) * query.values[d];
      }
      brute.emplace_back(dot / std::sqrt(na * nb), it.chunk.chunk_id);
    }
    std::sort(brute.begin(), brute.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const auto hits = idx.search(query, 5);
    ASSERT_EQ(hits.size(), 5u);
    for (int i = 0; i < 5; ++i) {
      EXPECT_EQ(hits[i].chunk_id, brute[i].second);
      EXPECT_NEAR(hits[i].score, brute[i].first, 1e-12);
    }
  }
}

TEST(VectorIndex, PersistRoundTrip) {
  testkit::TempDir tmp;
  std::mt19937 rng(3);
  VectorIndex idx(16, "m");
  std::vector<EmbeddedChunk> items;
  for (int i = 0; i < 10; ++i) items.push_back(item("id" + std::to_string(i), random_vec(rng, 16)));
  idx.add(items);
  const auto path = tmp.path() / "x.fdix";
  idx.persist(path);
  const auto loaded = VectorIndex::load(path);
  EXPECT_EQ(loaded.size(), 10u);
  EXPECT_EQ(loaded.model_id(), "m");
  EXPECT_EQ(loaded.chunks(), idx.chunks());
  for (int q = 0; q < 3; ++q) {
    const auto query = vec(random_vec(rng, 16));
    EXPECT_EQ(loaded.search(query, 4), idx.search(query, 4));
  }
  loaded.persist(tmp.path() / "y.fdix");
  EXPECT_EQ(read_file(path), read_file(tmp.path() / "y.fdix"));
}

TEST(VectorIndex, EmptyPersistRoundTrip) {
  testkit::TempDir tmp;
  VectorIndex(8).persist(tmp.path() / "e.fdix");
  const auto loaded = VectorIndex::load(tmp.path() / "e.fdix");
  EXPECT_EQ(loaded.size(), 0u);
  EXPECT_EQ(loaded.dim(), 8u);
}

TEST(VectorIndex, CorruptFilesAreRejected) {
  testkit::TempDir tmp;
  VectorIndex idx(4);
  idx.add({item("a", {1, 2, 3, 4}), item("b", {4, 3, 2, 1})});
  const auto path = tmp.path() / "i.fdix";
  idx.persist(path);
  const std::string bytes = read_file(path);

  auto expect_rejected = [&](const std::string& content, ErrorCode want) {
    write_file(tmp.path() / "bad.fdix", content);
    EXPECT_EQ(code_of([&] { VectorIndex::load(tmp.path() / "bad.fdix"); }), want);
  };
  std::string flipped = bytes;
  flipped[40] ^= 0x5a;
  expect_rejected(flipped, ErrorCode::kIoFailure);
  expect_rejected(bytes.substr(0, bytes.size() / 2), ErrorCode::kIoFailure);
  expect_rejected("XXXX" + bytes.substr(4), ErrorCode::kFormatVersionMismatch);
  std::string version = bytes;
  version[4] = 9;
  expect_rejected(version, ErrorCode::kFormatVersionMismatch);
  EXPECT_EQ(code_of([&] { VectorIndex::load(tmp.path() / "missing.fdix"); }), ErrorCode::kIoFailure);
}

TEST(VectorIndex, ScoreLookup) {
  VectorIndex idx(2);
  idx.add({item("a", {1, 0})});
  EXPECT_NEAR(*idx.score("a", vec({1, 1})), std::sqrt(0.5), 1e-12);
  EXPECT_FALSE(idx.score("b", vec({1, 1})).has_value());
}
