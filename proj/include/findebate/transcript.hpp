#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace findebate {

/// Half-open byte range [start, end) into a document's normalized raw text.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - start; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct SpeakerTurn {
  std::string speaker;
  std::string text;  // always raw_text.substr(span)
  CharSpan span;
};

struct TranscriptSection {
  std::string heading;
  std::vector<SpeakerTurn> turns;
};

enum class ParseWarning {
  kDegenerate,  // no speaker markers; the whole text became one unattributed turn
};

struct TranscriptDocument {
  std::string doc_id;
  std::optional<std::string> ticker;
  std::string title;
  std::vector<TranscriptSection> sections;
  std::string raw_text;  // CRLF-normalized input
  std::vector<ParseWarning> warnings;

  std::size_t turn_count() const noexcept;
};

inline constexpr std::string_view kBodySection = "Body";
inline constexpr std::string_view kUnattributedSpeaker = "Unattributed";

/// CRLF and lone CR become LF. The single normalization point for ids and spans.
std::string normalize_newlines(std::string_view raw);

/// SHA-256 hex of the newline-normalized bytes.
std::string doc_fingerprint(std::string_view raw);

/// Parses speaker-marked markdown:
///
///     ### Prepared remarks
///     **Operator**
///     : Greetings, and welcome...
///
/// `#`/`##` lines provide the title, `###` (or deeper) lines open sections, and a
/// line holding only `**Name**` opens a turn whose text may start on a following
/// line prefixed with `:`. Content before any marker becomes an "Unattributed"
/// turn (in a "Body" section when no heading is open). With zero speaker markers
/// the whole text is one unattributed turn and kDegenerate is reported.
///
/// Throws Error(kEmptyInput) for blank input or input with no content.
TranscriptDocument parse_transcript(std::string_view raw);

/// Runs of whitespace become one space; leading/trailing whitespace is dropped.
std::string collapse_whitespace(std::string_view text);

TranscriptDocument load_transcript(const std::filesystem::path& path);

/// Sorted list of `*.txt` / `*.md` files under `dir` (recursive).
std::vector<std::filesystem::path> list_transcripts(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace findebate
