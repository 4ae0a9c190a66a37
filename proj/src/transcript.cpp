#include "findebate/transcript.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include "findebate/error.hpp"
#include "findebate/hashing.hpp"

namespace findebate {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// `**Name**` alone on a line; returns the name.
std::optional<std::string> speaker_marker(std::string_view trimmed) {
  if (trimmed.size() < 5 || !trimmed.starts_with("**") || !trimmed.ends_with("**")) {
    return std::nullopt;
  }
  std::string_view inner = trim(trimmed.substr(2, trimmed.size() - 4));
  if (inner.empty() || inner.find("**") != std::string_view::npos) return std::nullopt;
  return std::string(inner);
}

struct Heading {
  int level = 0;
  std::string text;
};

std::optional<Heading> heading_line(std::string_view trimmed) {
  if (trimmed.empty() || trimmed.front() != '#') return std::nullopt;
  std::size_t n = 0;
  while (n < trimmed.size() && trimmed[n] == '#') ++n;
  if (n < trimmed.size() && !is_space(trimmed[n])) return std::nullopt;
  return Heading{static_cast<int>(n), std::string(trim(trimmed.substr(n)))};
}

std::optional<std::string> find_ticker(std::string_view text) {
  static const std::regex kExchange(
      R"(\((?:NYSE|NASDAQ|Nasdaq|AMEX|NYSE American|NYSE Arca|TSX|LSE|OTC)\s*:\s*([A-Z][A-Z0-9.\-]{0,9})\))");
  static const std::regex kLabel(R"((?:^|\n)\s*Ticker\s*:\s*([A-Z][A-Z0-9.\-]{0,9})\b)");
  const std::string head(text.substr(0, std::min<std::size_t>(text.size(), 4000)));
  std::smatch m;
  if (std::regex_search(head, m, kExchange) || std::regex_search(head, m, kLabel)) {
    return m[1].str();
  }
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  void run() {
    std::size_t pos = 0;
    while (pos < text_.size()) {
      std::size_t eol = text_.find('\n', pos);
      if (eol == std::string::npos) eol = text_.size();
      line(pos, eol);
      pos = eol + 1;
    }
    close_turn();
  }

  std::vector<TranscriptSection> take_sections() {
    std::vector<TranscriptSection> out;
    for (auto& s : sections_) {
      if (!s.turns.empty()) out.push_back(std::move(s));
    }
    return out;
  }

  int markers() const { return markers_; }
  const std::string& title() const { return title_; }
  const std::string& first_section_heading() const { return first_heading_; }

 private:
  void line(std::size_t begin, std::size_t end) {
    std::string_view raw_line(text_.data() + begin, end - begin);
    std::string_view t = trim(raw_line);
    if (t.empty()) return;

    if (auto h = heading_line(t)) {
      close_turn();
      if (h->level <= 2) {
        if (title_.empty()) title_ = h->text;
      } else {
        if (first_heading_.empty()) first_heading_ = h->text;
        sections_.push_back(TranscriptSection{h->text, {}});
        section_open_ = true;
      }
      return;
    }
    if (auto name = speaker_marker(t)) {
      close_turn();
      ++markers_;
      turn_open_ = true;
      speaker_ = *name;
      expect_colon_ = true;
      return;
    }

    std::size_t content_begin = begin + static_cast<std::size_t>(t.data() - raw_line.data());
    std::size_t content_end = content_begin + t.size();
    if (expect_colon_) {
      expect_colon_ = false;
      if (t.front() == ':') {
        ++content_begin;
        while (content_begin < content_end && is_space(text_[content_begin])) ++content_begin;
        if (content_begin == content_end) return;  // bare ":" line
      }
    }
    if (!turn_open_) {
      turn_open_ = true;
      speaker_ = std::string(kUnattributedSpeaker);
    }
    if (!has_content_) {
      has_content_ = true;
      start_ = content_begin;
    }
    end_ = content_end;
  }

  void close_turn() {
    if (turn_open_ && has_content_) {
      if (!section_open_) {
        sections_.push_back(TranscriptSection{std::string(kBodySection), {}});
        section_open_ = true;
      }
      sections_.back().turns.push_back(
          SpeakerTurn{speaker_, text_.substr(start_, end_ - start_), CharSpan{start_, end_}});
    }
    turn_open_ = false;
    has_content_ = false;
    expect_colon_ = false;
  }

  const std::string& text_;
  std::vector<TranscriptSection> sections_;
  std::string title_;
  std::string first_heading_;
  std::string speaker_;
  bool section_open_ = false;
  bool turn_open_ = false;
  bool has_content_ = false;
  bool expect_colon_ = false;
  std::size_t start_ = 0;
  std::size_t end_ = 0;
  int markers_ = 0;
};

}  // namespace

std::size_t TranscriptDocument::turn_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sections) n += s.turns.size();
  return n;
}

std::string normalize_newlines(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
    } else {
      out.push_back(raw[i]);
    }
  }
  return out;
}

std::string doc_fingerprint(std::string_view raw) { return sha256_hex(normalize_newlines(raw)); }

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

TranscriptDocument parse_transcript(std::string_view raw) {
  TranscriptDocument doc;
  doc.raw_text = normalize_newlines(raw);
  if (trim(doc.raw_text).empty()) {
    throw Error(ErrorCode::kEmptyInput, "transcript is blank");
  }
  doc.doc_id = sha256_hex(doc.raw_text);

  Parser parser(doc.raw_text);
  parser.run();

  if (parser.markers() == 0) {
    const std::string_view body = trim(doc.raw_text);
    const std::size_t start = static_cast<std::size_t>(body.data() - doc.raw_text.data());
    const CharSpan span{start, start + body.size()};
    doc.sections.push_back(TranscriptSection{
        std::string(kBodySection),
        {SpeakerTurn{std::string(kUnattributedSpeaker), std::string(body), span}}});
    doc.warnings.push_back(ParseWarning::kDegenerate);
  } else {
    doc.sections = parser.take_sections();
    if (doc.sections.empty()) {
      throw Error(ErrorCode::kEmptyInput, "transcript has markup but no spoken content");
    }
  }

  doc.title = parser.title();
  if (doc.title.empty()) doc.title = parser.first_section_heading();
  if (doc.title.empty()) {
    std::string first = collapse_whitespace(doc.sections.front().turns.front().text.substr(0, 200));
    if (first.size() > 80) first = first.substr(0, 80);
    doc.title = first;
  }
  doc.ticker = find_ticker(doc.raw_text);
  return doc;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read failed for " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

TranscriptDocument load_transcript(const std::filesystem::path& path) {
  return parse_transcript(read_file(path));
}

std::vector<std::filesystem::path> list_transcripts(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  for (auto it = std::filesystem::recursive_directory_iterator(dir, ec);
       !ec && it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    const auto ext = it->path().extension().string();
    if (ext == ".txt" || ext == ".md") out.push_back(it->path());
  }
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot walk " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace findebate
