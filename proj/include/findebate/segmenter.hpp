#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "findebate/transcript.hpp"

namespace findebate {

enum class BoundaryKind { kParagraph, kSentence, kToken };

std::string_view boundary_kind_name(BoundaryKind kind);

struct Chunk {
  std::string chunk_id;  // "<doc_id>#<ordinal, 5 digits>"
  std::string doc_id;
  std::string text;
  CharSpan span;
  BoundaryKind boundary_kind = BoundaryKind::kParagraph;
  std::string section_heading;
  std::string speaker;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct SegmenterConfig {
  std::size_t max_chunk_tokens = 512;
  std::size_t min_chunk_tokens = 32;

  /// Throws Error(kInvalidConfig) unless 0 < min < max.
  void validate() const;
};

/// Whitespace-delimited word count.
std::size_t token_estimate(std::string_view text);

/// Paragraph spans (blank-line separated, trimmed) inside [span.start, span.end).
std::vector<CharSpan> paragraph_spans(std::string_view text, CharSpan span);

/// Sentence spans inside a paragraph. A sentence ends at `.`, `?` or `!` (plus any
/// closing quotes/brackets) followed by whitespace and an uppercase letter or an
/// opening quote, unless the word ending there is a known abbreviation.
std::vector<CharSpan> sentence_spans(std::string_view text, CharSpan span);

/// Word spans inside a range.
std::vector<CharSpan> word_spans(std::string_view text, CharSpan span);

/// Recursive boundary-preserving segmentation of every speaker turn:
///  - a paragraph that fits max_chunk_tokens is one chunk (kParagraph);
///  - otherwise consecutive sentences are packed greedily up to the limit (kSentence);
///  - a sentence over the limit is cut into word windows of at most the limit
///    (kToken); a trailing window under min_chunk_tokens is rebalanced with its
///    predecessor.
/// Chunks never cross turn or paragraph boundaries and never overlap.
std::vector<Chunk> segment_document(const TranscriptDocument& doc, const SegmenterConfig& cfg = {});

/// One JSON object per line.
void write_chunks_jsonl(const std::vector<Chunk>& chunks, const std::filesystem::path& path);
std::vector<Chunk> read_chunks_jsonl(const std::filesystem::path& path);

}  // namespace findebate
