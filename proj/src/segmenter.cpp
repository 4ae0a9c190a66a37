#include "findebate/segmenter.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "findebate/error.hpp"
#include "findebate/json_io.hpp"

namespace findebate {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

constexpr std::array<std::string_view, 24> kAbbreviations = {
    "Mr.",  "Mrs.", "Ms.",  "Dr.",  "Prof.", "Inc.", "Corp.", "Co.",  "Ltd.", "LLC.", "Jr.",  "Sr.",
    "St.",  "vs.",  "etc.", "No.",  "Q.",    "U.S.", "U.K.", "e.g.", "i.e.", "approx.", "Jan.", "Feb."};

bool is_closing(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// Opening quote (ASCII or UTF-8 curly) at text[k].
bool opens_quote(std::string_view text, std::size_t k) {
  if (text[k] == '"' || text[k] == '\'') return true;
  return text.substr(k).starts_with("\xE2\x80\x9C") || text.substr(k).starts_with("\xE2\x80\x98");
}

bool ends_with_abbreviation(std::string_view text, std::size_t word_begin, std::size_t dot) {
  std::string_view word = text.substr(word_begin, dot + 1 - word_begin);
  while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\'')) {
    word.remove_prefix(1);
  }
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

std::string make_chunk_id(const std::string& doc_id, std::size_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%05zu", ordinal);
  return doc_id + buf;
}

class Builder {
 public:
  Builder(const TranscriptDocument& doc, const SegmenterConfig& cfg) : doc_(doc), cfg_(cfg) {}

  std::vector<Chunk> run() {
    for (const auto& section : doc_.sections) {
      for (const auto& turn : section.turns) {
        for (const CharSpan& para : paragraph_spans(doc_.raw_text, turn.span)) {
          paragraph(para, section.heading, turn.speaker);
        }
      }
    }
    return std::move(out_);
  }

 private:
  std::size_t tokens(CharSpan s) const {
    return token_estimate(std::string_view(doc_.raw_text).substr(s.start, s.size()));
  }

  void emit(CharSpan s, BoundaryKind kind, const std::string& heading, const std::string& speaker) {
    Chunk c;
    c.chunk_id = make_chunk_id(doc_.doc_id, out_.size());
    c.doc_id = doc_.doc_id;
    c.text = doc_.raw_text.substr(s.start, s.size());
    c.span = s;
    c.boundary_kind = kind;
    c.section_heading = heading;
    c.speaker = speaker;
    out_.push_back(std::move(c));
  }

  void paragraph(CharSpan para, const std::string& heading, const std::string& speaker) {
    if (tokens(para) <= cfg_.max_chunk_tokens) {
      emit(para, BoundaryKind::kParagraph, heading, speaker);
      return;
    }
    CharSpan group;
    bool open = false;
    std::size_t group_tokens = 0;
    auto flush = [&] {
      if (open) emit(group, BoundaryKind::kSentence, heading, speaker);
      open = false;
      group_tokens = 0;
    };
    for (const CharSpan& sent : sentence_spans(doc_.raw_text, para)) {
      const std::size_t n = tokens(sent);
      if (n > cfg_.max_chunk_tokens) {
        flush();
        split_words(sent, heading, speaker);
        continue;
      }
      if (open && group_tokens + n > cfg_.max_chunk_tokens) flush();
      if (open) {
        group.end = sent.end;
      } else {
        group = sent;
        open = true;
      }
      group_tokens += n;
    }
    flush();
  }

  void split_words(CharSpan sent, const std::string& heading, const std::string& speaker) {
    const auto words = word_spans(doc_.raw_text, sent);
    const std::size_t max = cfg_.max_chunk_tokens;
    std::vector<std::size_t> sizes;
    for (std::size_t left = words.size(); left > 0;) {
      const std::size_t take = std::min(left, max);
      sizes.push_back(take);
      left -= take;
    }
    if (sizes.size() >= 2 && sizes.back() < cfg_.min_chunk_tokens) {
      const std::size_t total = sizes[sizes.size() - 2] + sizes.back();
      sizes[sizes.size() - 2] = (total + 1) / 2;
      sizes.back() = total / 2;
    }
    std::size_t w = 0;
    for (std::size_t size : sizes) {
      emit(CharSpan{words[w].start, words[w + size - 1].end}, BoundaryKind::kToken, heading, speaker);
      w += size;
    }
  }

  const TranscriptDocument& doc_;
  const SegmenterConfig& cfg_;
  std::vector<Chunk> out_;
};

}  // namespace

std::string_view boundary_kind_name(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::kParagraph: return "paragraph";
    case BoundaryKind::kSentence: return "sentence";
    case BoundaryKind::kToken: return "token";
  }
  return "unknown";
}

void SegmenterConfig::validate() const {
  if (min_chunk_tokens == 0 || max_chunk_tokens == 0 || min_chunk_tokens >= max_chunk_tokens) {
    throw Error(ErrorCode::kInvalidConfig, "segmenter requires 0 < min_chunk_tokens < max_chunk_tokens");
  }
}

std::size_t token_estimate(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

std::vector<CharSpan> paragraph_spans(std::string_view text, CharSpan span) {
  std::vector<CharSpan> out;
  std::optional<CharSpan> current;
  std::size_t pos = span.start;
  while (pos < span.end) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos || eol > span.end) eol = span.end;
    std::size_t b = pos;
    std::size_t e = eol;
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    if (b == e) {
      if (current) out.push_back(*current);
      current.reset();
    } else if (current) {
      current->end = e;
    } else {
      current = CharSpan{b, e};
    }
    pos = eol + 1;
  }
  if (current) out.push_back(*current);
  return out;
}

std::vector<CharSpan> sentence_spans(std::string_view text, CharSpan span) {
  std::vector<CharSpan> out;
  std::size_t start = span.start;
  while (start < span.end && is_space(text[start])) ++start;
  std::size_t word_begin = start;
  for (std::size_t i = start; i < span.end; ++i) {
    const char c = text[i];
    if (is_space(c)) {
      word_begin = i + 1;
      continue;
    }
    if (c != '.' && c != '?' && c != '!') continue;
    std::size_t j = i + 1;
    while (j < span.end && is_closing(text[j])) ++j;
    if (j >= span.end || !is_space(text[j])) continue;
    std::size_t k = j;
    while (k < span.end && is_space(text[k])) ++k;
    if (k >= span.end) continue;
    if (!std::isupper(static_cast<unsigned char>(text[k])) && !opens_quote(text, k)) continue;
    if (c == '.' && ends_with_abbreviation(text, word_begin, i)) continue;
    out.push_back(CharSpan{start, j});
    start = k;
    i = k - 1;
    word_begin = k;
  }
  std::size_t end = span.end;
  while (end > start && is_space(text[end - 1])) --end;
  if (end > start) out.push_back(CharSpan{start, end});
  return out;
}

std::vector<CharSpan> word_spans(std::string_view text, CharSpan span) {
  std::vector<CharSpan> out;
  std::size_t i = span.start;
  while (i < span.end) {
    while (i < span.end && is_space(text[i])) ++i;
    if (i >= span.end) break;
    std::size_t j = i;
    while (j < span.end && !is_space(text[j])) ++j;
    out.push_back(CharSpan{i, j});
    i = j;
  }
  return out;
}

std::vector<Chunk> segment_document(const TranscriptDocument& doc, const SegmenterConfig& cfg) {
  cfg.validate();
  return Builder(doc, cfg).run();
}

void write_chunks_jsonl(const std::vector<Chunk>& chunks, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  for (const auto& c : chunks) out << nlohmann::json(c).dump() << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

std::vector<Chunk> read_chunks_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::vector<Chunk> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<Chunk>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kIoFailure, "malformed chunk record in " + path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace findebate
