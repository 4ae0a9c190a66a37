// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "findebate/backends.hpp"
#include "findebate/debate.hpp"
#include "findebate/error.hpp"
#include "findebate/judge.hpp"
#include "findebate/pipeline.hpp"
#include "findebate/report.hpp"
#include "findebate/retrieval.hpp"
#include "findebate/segmenter.hpp"
#include "findebate/vector_index.hpp"

using namespace findebate;
namespace fs = std::filesystem;

namespace {

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

fs::path fixture(const std::string& name) { return fs::path(FINDEBATE_FIXTURE_DIR) / name; }

GatewayOptions quiet_options() {
  GatewayOptions o;
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("findebate_accept_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// ---------------------------------------------------------------------------
// Segmenter

struct GenSentence {
  std::size_t start, end, words;
};
struct GenParagraph {
  std::size_t start, end, words;
  std::vector<GenSentence> sentences;
};
struct GenDoc {
  std::string text;
  std::vector<bool> content;  // true for characters that belong to turn bodies
  std::vector<GenParagraph> paragraphs;
  std::size_t sentence_count = 0;
};

const char* const kCapitals[] = {"Revenue", "Margins", "We", "Our", "Demand", "Guidance", "Costs", "The"};

std::string lower_word(std::mt19937& rng) {
  static const char* const kWords[] = {"grew", "strong", "quarter", "labor", "pricing", "cash", "flow", "3.5",
                                       "percent", "outlook", "margin", "client", "demand", "billion", "steady", "q3"};
  return kWords[rng() % std::size(kWords)];
}

GenDoc generate_doc(std::mt19937& rng, std::size_t max_tokens) {
  GenDoc d;
  auto put = [&](const std::string& s, bool content) {
    d.text += s;
    d.content.insert(d.content.end(), s.size(), content);
  };
  put("## Synthetic call " + std::to_string(rng() % 1000) + "\n\n", false);
  const std::size_t target = 1 + rng() % 60;
  const char* const speakers[] = {"Operator", "CEO", "CFO", "Analyst"};
  while (d.sentence_count < target) {
    if (rng() % 3 == 0) put("### Section " + std::to_string(rng() % 9) + "\n\n", false);
    put(std::string("**") + speakers[rng() % 4] + "**\n: ", false);
    const std::size_t paras = 1 + rng() % 3;
    for (std::size_t p = 0; p < paras && d.sentence_count < target; ++p) {
      if (p) put("\n\n", false);
      GenParagraph para{d.text.size(), 0, 0, {}};
      const std::size_t sentences = 1 + rng() % 6;
      for (std::size_t s = 0; s < sentences && d.sentence_count < target; ++s) {
        if (s) put(rng() % 5 == 0 ? "\n" : " ", false);
        // Mostly short sentences, sometimes one longer than the chunk limit.
        std::size_t n = 1 + rng() % (max_tokens / 2 + 1);
        if (rng() % 8 == 0) n = max_tokens + rng() % (2 * max_tokens);
        GenSentence sent{d.text.size(), 0, n};
        put(kCapitals[rng() % std::size(kCapitals)], true);
        for (std::size_t w = 1; w < n; ++w) {
          put(" ", false);
          put(lower_word(rng), true);
        }
        put(rng() % 4 == 0 ? "?" : ".", true);
        sent.end = d.text.size();
        para.sentences.push_back(sent);
        para.words += n;
        ++d.sentence_count;
      }
      para.end = d.text.size();
      d.paragraphs.push_back(para);
    }
    put("\n\n", false);
  }
  return d;
}

// Exhaustive search over every way to cut a run of sentences into contiguous
// groups; returns the fewest groups that all fit, or SIZE_MAX if none does.
std::size_t min_groups(const std::vector<std::size_t>& words, std::size_t from, std::size_t max,
                       std::map<std::size_t, std::size_t>& memo) {
  if (from == words.size()) return 0;
  if (auto it = memo.find(from); it != memo.end()) return it->second;
  std::size_t best = SIZE_MAX;
  std::size_t total = 0;
  for (std::size_t to = from; to < words.size(); ++to) {
    total += words[to];
    if (total > max) break;
    const std::size_t rest = min_groups(words, to + 1, max, memo);
    if (rest != SIZE_MAX) best = std::min(best, rest + 1);
  }
  memo[from] = best;
  return best;
}

std::string check_segmenter() {
  std::mt19937 rng(20250101);
  std::size_t oracle_docs = 0, chunks_total = 0;
  for (int doc_no = 0; doc_no < 200; ++doc_no) {
    const std::size_t max = 8 + rng() % 40;
    const SegmenterConfig cfg{max, 1 + max / 4};
    const GenDoc g = generate_doc(rng, max);
    const auto doc = parse_transcript(g.text);
    require(doc.raw_text == g.text, "generated text changed by parsing");
    const auto chunks = segment_document(doc, cfg);
    chunks_total += chunks.size();
    const std::string where = "doc " + std::to_string(doc_no) + ": ";

    std::vector<int> cover(g.text.size(), 0);
    for (const auto& c : chunks) {
      require(token_estimate(c.text) <= max, where + "chunk over limit");
      require(c.text == g.text.substr(c.span.start, c.span.size()), where + "chunk text differs from span");
      for (std::size_t i = c.span.start; i < c.span.end; ++i) ++cover[i];
    }
    for (std::size_t i = 0; i < g.text.size(); ++i) {
      const bool ws = std::isspace(static_cast<unsigned char>(g.text[i])) != 0;
      if (g.content[i]) require(cover[i] == 1, where + "content byte covered " + std::to_string(cover[i]) + " times");
      if (!g.content[i] && !ws) require(cover[i] == 0, where + "markup byte inside a chunk");
    }

    if (g.sentence_count > 50) continue;
    ++oracle_docs;
    for (const auto& para : g.paragraphs) {
      std::vector<const Chunk*> inside;
      for (const auto& c : chunks) {
        if (c.span.start >= para.start && c.span.end <= para.end) inside.push_back(&c);
      }
      if (para.words <= max) {
        require(inside.size() == 1 && inside[0]->span == CharSpan{para.start, para.end} &&
                    inside[0]->boundary_kind == BoundaryKind::kParagraph,
                where + "fitting paragraph not kept whole");
        continue;
      }
      // Runs of sentences that fit individually can be grouped at sentence level;
      // the oracle finds the minimum grouping, which the greedy packer must match.
      std::size_t expected_sentence_chunks = 0;
      std::vector<std::size_t> run;
      std::map<std::size_t, std::size_t> memo;
      auto close_run = [&] {
        if (run.empty()) return;
        memo.clear();
        expected_sentence_chunks += min_groups(run, 0, max, memo);
        run.clear();
      };
      for (const auto& s : para.sentences) {
        if (s.words > max) {
          close_run();
          for (const Chunk* c : inside) {
            if (c->span.start >= s.start && c->span.end <= s.end) {
              require(c->boundary_kind == BoundaryKind::kToken, where + "oversized sentence split above token level");
            }
          }
        } else {
          run.push_back(s.words);
          bool found = false;
          for (const Chunk* c : inside) {
            if (c->span.start <= s.start && c->span.end >= s.end) {
              require(c->boundary_kind == BoundaryKind::kSentence, where + "fitting sentence not at sentence level");
              found = true;
            }
          }
          require(found, where + "fitting sentence was split");
        }
      }
      close_run();
      const auto sentence_chunks = std::count_if(inside.begin(), inside.end(), [](const Chunk* c) {
        return c->boundary_kind == BoundaryKind::kSentence;
      });
      require(static_cast<std::size_t>(sentence_chunks) == expected_sentence_chunks,
              where + "sentence packing differs from the oracle's minimum");
    }
  }
  require(oracle_docs >= 100, "too few documents under 50 sentences");
  return std::to_string(oracle_docs) + " docs checked against the split oracle, " + std::to_string(chunks_total) +
         " chunks";
}

// ---------------------------------------------------------------------------
// Vector index

std::string check_index() {
  std::mt19937 rng(4242);
  std::normal_distribution<float> normal;
  std::size_t queries = 0, ties = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 64;
    std::vector<EmbeddedChunk> items;
    for (std::size_t i = 0; i < n; ++i) {
      EmbeddedChunk e;
      char id[16];
      std::snprintf(id, sizeof(id), "c%03zu", static_cast<std::size_t>(rng() % 1000));
      e.chunk.chunk_id = std::string(id) + "_" + std::to_string(i);
      if (i > 0 && rng() % 6 == 0) {
        e.vector = items[rng() % i].vector;  // exact duplicate vector, forces a tie
      } else {
        e.vector.values.resize(256);
        for (auto& x : e.vector.values) x = normal(rng);
      }
      items.push_back(e);
    }
    VectorIndex idx(256);
    idx.add(items);
    for (int q = 0; q < 10; ++q) {
      EmbeddingVector query;
      query.values.resize(256);
      if (q % 3 == 0) {
        query = items[rng() % n].vector;
      } else {
        for (auto& x : query.values) x = normal(rng);
      }
      std::vector<std::pair<double, std::string>> scan;
      double qn = 0;
      for (float x : query.values) qn += double(x) * x;
      qn = std::sqrt(qn);
      for (const auto& it : items) {
        double vn = 0;
        for (float x : it.vector.values) vn += double(x) * x;
        vn = std::sqrt(vn);
        double dot = 0;
        for (std::size_t d = 0; d < 256; ++d) dot += (double(it.vector.values[d]) / vn) * (double(query.values[d]) / qn);
        scan.emplace_back(std::clamp(dot, -1.0, 1.0), it.chunk.chunk_id);
      }
      std::sort(scan.begin(), scan.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      const auto hits = idx.search(query, 5);
      require(hits.size() == std::min<std::size_t>(5, n), "wrong hit count");
      for (std::size_t i = 0; i < hits.size(); ++i) {
        require(hits[i].chunk_id == scan[i].second, "ranking differs from exhaustive scan in index " + std::to_string(t));
        require(std::abs(hits[i].score - scan[i].first) <= 1e-12, "score differs from exhaustive scan");
        if (i && hits[i].score == hits[i - 1].score) ++ties;
      }
      ++queries;
    }
  }
  return std::to_string(queries) + " queries, " + std::to_string(ties) + " tied neighbours";
}

// ---------------------------------------------------------------------------
// Retrieval

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += double(a[i]) * b[i];
    na += double(a[i]) * a[i];
    nb += double(b[i]) * b[i];
  }
  return dot / std::sqrt(na * nb);
}

std::string check_retrieval() {
  auto embedder = std::make_shared<OfflineEmbedder>(256);
  ModelGateway gw(nullptr, embedder, quiet_options());
  const auto doc = load_transcript(fixture("twelve_chunks.md"));
  const auto chunks = segment_document(doc);
  require(chunks.size() == 12, "fixture should give 12 chunks");
  std::vector<EmbeddedChunk> items;
  for (const auto& c : chunks) items.push_back({c, embedder->embed_one(c.text)});
  VectorIndex idx(256);
  idx.add(items);
  const auto bank = default_query_bank();
  const std::size_t k = 4;
  const auto bundle = retrieve_evidence(idx, bank, gw, k);

  // Full (query x chunk) matrix.
  std::map<std::string, double> global;
  std::set<std::string> expected_union;
  for (const auto& dim : bank) {
    std::map<std::string, double> dim_best;
    for (const auto& q : dim.queries) {
      const auto qv = embedder->embed_one(q).values;
      for (const auto& it : items) {
        const double s = cosine(it.vector.values, qv);
        auto [d, fresh_d] = dim_best.emplace(it.chunk.chunk_id, s);
        if (!fresh_d) d->second = std::max(d->second, s);
        auto [g, fresh_g] = global.emplace(it.chunk.chunk_id, s);
        if (!fresh_g) g->second = std::max(g->second, s);
      }
    }
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& [id, s] : dim_best) ranked.emplace_back(s, id);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const DimensionHits* got = bundle.dimension(dim.name);
    require(got && got->hits.size() == k, "dimension list size for " + dim.name);
    for (std::size_t i = 0; i < k; ++i) {
      require(got->hits[i].chunk_id == ranked[i].second, "per-dimension ranking for " + dim.name);
      require(std::abs(got->hits[i].score - ranked[i].first) <= 1e-9, "per-dimension score for " + dim.name);
      expected_union.insert(ranked[i].second);
    }
  }
  require(bundle.flattened.size() == expected_union.size(), "flattened size");
  double worst = 0;
  std::set<std::string> seen;
  for (const auto& h : bundle.flattened) {
    require(seen.insert(h.chunk_id).second, "duplicate in flattened");
    require(expected_union.count(h.chunk_id) == 1, "unexpected chunk in flattened");
    worst = std::max(worst, std::abs(h.score - global.at(h.chunk_id)));
  }
  require(worst <= 1e-9, "flattened score off by " + std::to_string(worst));
  std::ostringstream msg;
  msg << bundle.flattened.size() << " unique chunks, max deviation " << worst;
  return msg.str();
}

// ---------------------------------------------------------------------------
// Debate

std::string random_report(std::mt19937& rng) {
  static const Position kPos[] = {Position::kLong, Position::kShort, Position::kNeutral};
  std::vector<Recommendation> recs;
  const bool incomplete = rng() % 20 == 0;  // some drafts miss a horizon and must be skipped
  for (Timeframe t : kAllTimeframes) {
    if (incomplete && t == Timeframe::kOneWeek) continue;
    recs.push_back({t, kPos[rng() % 3], static_cast<int>(50 + rng() % 46), "Because of the quarter."});
  }
  std::string out = "# Report\n\n## Executive Summary\nSummary text.\n\n";
  if (rng() % 2) out += "## Risk Assessment\nRisks.\n\n";
  return out + "## Multi-Timeframe Investment Strategy\n\n" + render_recommendations(recs);
}

// One random corruption of the report text.
std::string mutate(const std::string& text, std::mt19937& rng) {
  std::string s = text;
  auto replace_first = [&](const std::string& from, const std::string& to) {
    const auto at = s.find(from);
    if (at != std::string::npos) s.replace(at, from.size(), to);
  };
  switch (rng() % 9) {
    case 0: {  // flip a direction
      static const char* const kFlips[][2] = {
          {"Position: LONG", "Position: SHORT"}, {"Position: SHORT", "Position: LONG"},
          {"Position: NEUTRAL", "Position: LONG"}, {"Position: LONG", "Position: NEUTRAL"}};
      const auto& f = kFlips[rng() % 4];
      replace_first(f[0], f[1]);
      break;
    }
    case 1: {  // delete a timeframe section
      static const char* const kHeads[] = {"1-DAY", "1-WEEK", "1-MONTH"};
      const auto at = s.find(kHeads[rng() % 3]);
      if (at != std::string::npos) {
        const auto next = s.find("\n\n", at);
        s.erase(at, next == std::string::npos ? std::string::npos : next - at);
      }
      break;
    }
    case 2: {  // corrupt a conviction
      const auto at = s.find("Conviction: ");
      if (at != std::string::npos) {
        const auto eol = s.find('\n', at);
        static const char* const kBad[] = {"0%", "99%", "150%", "12.5%", "70-80%", "high", "5%", "96%", "35%"};
        s.replace(at + 12, eol - at - 12, rng() % 2 ? kBad[rng() % 9] : std::to_string(rng() % 120) + "%");
      }
      break;
    }
    case 3: {  // delete a non-stance section
      const auto at = s.find("## ");
      if (at != std::string::npos) {
        const auto next = s.find("\n\n", at);
        s.erase(at, next == std::string::npos ? std::string::npos : next - at + 2);
      }
      break;
    }
    case 4:
      s = "I cannot comply.";
      break;
    case 5:
      s += "\n\n## Extra Commentary\nMore detail.\n";
      break;
    case 6:  // lowercase a position token so it no longer parses
      replace_first("Position: ", "position: long ");
      break;
    case 7:  // duplicate a timeframe with another stance earlier in the text
      s = "1-DAY TRADING RECOMMENDATION\nPosition: SHORT\nConviction: 90%\n\n" + s;
      break;
    default:
      break;  // unchanged
  }
  return s;
}

std::string check_debate_safety() {
  std::mt19937 rng(777);
  std::map<DebateOutcome, int> outcomes;
  for (int trial = 0; trial < 1000; ++trial) {
    const StructuredReport r0 = parse_report(random_report(rng));
    auto chat = std::make_shared<MockChatBackend>(trial);
    std::mt19937 adversary(static_cast<std::uint32_t>(trial * 7919 + 1));
    const int fail_rate = static_cast<int>(rng() % 20);
    chat->set_responder("*", [&adversary, fail_rate](const ChatRequest& r) -> std::string {
      if (static_cast<int>(adversary() % 100) < fail_rate) throw TransientError("adversarial outage");
      const auto open = r.user_prompt.find("<<<REPORT\n");
      const auto close = r.user_prompt.find("\nREPORT>>>");
      std::string text = open == std::string::npos ? "" : r.user_prompt.substr(open + 10, close - open - 10);
      const int edits = static_cast<int>(adversary() % 4);
      for (int i = 0; i < edits; ++i) text = mutate(text, adversary);
      return text.empty() ? std::string("?") : text;
    });
    ModelGateway gw(chat, nullptr, quiet_options());
    DebateOptions opts;
    opts.rounds = 1 + static_cast<int>(rng() % 3);
    const DebateSession s = run_safe_debate(r0, {}, gw, opts);
    const StructuredReport& fin = s.final_report();
    const bool identical = fin.markdown == r0.markdown;
    require(identical || !core_compromised(r0, fin), "trial " + std::to_string(trial) + " returned a compromised report");
    if (s.outcome != DebateOutcome::kOptimized) {
      require(identical, "trial " + std::to_string(trial) + " reverted without returning r0");
    }
    ++outcomes[s.outcome];
  }
  std::ostringstream msg;
  msg << "1000 trials, 0 violations;";
  for (const auto& [o, n] : outcomes) msg << " " << outcome_name(o) << "=" << n;
  return msg.str();
}

std::string check_debate_paths() {
  const std::string draft = mock_report_text("Source digest: acceptance");
  std::map<DebateOutcome, bool> hit;
  auto run = [&](const std::string& r0_text, const std::function<void(MockChatBackend&)>& setup) {
    auto chat = std::make_shared<MockChatBackend>();
    setup(*chat);
    ModelGateway gw(chat, nullptr, quiet_options());
    const auto r0 = parse_report(r0_text);
    auto s = run_safe_debate(r0, {}, gw);
    hit[s.outcome] = true;
    return std::make_pair(r0, s);
  };

  {
    auto [r0, s] = run("# Report\n\nNo stance.\n", [](MockChatBackend&) {});
    require(s.outcome == DebateOutcome::kSkippedNoRecommendations, "skip path");
    require(s.final_report().markdown == r0.markdown, "skip path must return r0 exactly");
    require(s.log.size() == 1 && s.log[0].phase == DebatePhase::kSafetyCheck, "skip path log");
  }
  {
    auto [r0, s] = run(draft, [](MockChatBackend&) {});
    require(s.outcome == DebateOutcome::kOptimized, "optimized path");
    require(s.final_report().markdown != r0.markdown && !core_compromised(r0, s.final_report()), "optimized report");
  }
  {
    auto [r0, s] = run(draft, [](MockChatBackend& c) {
      c.set_responder("leader_agent", [](const ChatRequest& r) {
        const auto open = r.user_prompt.find("<<<REPORT\n") + 10;
        std::string text = r.user_prompt.substr(open, r.user_prompt.find("\nREPORT>>>") - open);
        text.replace(text.find("Position: LONG"), 14, "Position: SHORT");
        return text;
      });
    });
    require(s.outcome == DebateOutcome::kRevertedCoreCompromised, "core compromised path");
    require(s.final_report().markdown == r0.markdown, "reverted path must return r0 exactly");
    require(s.log.back().phase == DebatePhase::kFinalCheck, "final check logged");
  }
  {
    auto [r0, s] = run(draft, [](MockChatBackend& c) { c.fail_role("leader_agent"); });
    require(s.outcome == DebateOutcome::kRevertedPhaseFailure, "phase failure path");
    require(s.final_report().markdown == r0.markdown, "phase failure must return r0 exactly");
  }
  require(hit.size() == 4, "not every outcome reached");
  return "Optimized, SkippedNoRecommendations, RevertedCoreCompromised, RevertedPhaseFailure";
}

// ---------------------------------------------------------------------------
// End to end

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FINDEBATE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_symlink() || !e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), root).string();
    std::string bytes = read_file(e.path());
    if (rel == "manifest.json") {
      auto m = nlohmann::json::parse(bytes);
      m.erase("run_info");
      bytes = m.dump(2);
    }
    out[rel] = std::move(bytes);
  }
  return out;
}

std::string check_determinism() {
  TempDir a, b;
  const std::string fx = fixture("abm_q3_2021_call.md").string();
  require(run_cli("analyze --offline --mode findebate --out " + a.path().string() + " " + fx) == 0, "first run failed");
  require(run_cli("analyze --offline --mode findebate --out " + b.path().string() + " " + fx) == 0, "second run failed");
  const auto ra = find_run_dirs(a.path());
  const auto rb = find_run_dirs(b.path());
  require(ra.size() == 1 && rb.size() == 1, "expected one run directory each");
  require(fs::relative(ra[0], a.path()).parent_path() == fs::relative(rb[0], b.path()).parent_path(),
          "run grouping differs");
  const auto ta = tree(ra[0]);
  const auto tb = tree(rb[0]);
  require(ta.size() == tb.size(), "artifact lists differ");
  for (const auto& [rel, bytes] : ta) {
    auto it = tb.find(rel);
    require(it != tb.end(), "missing in second run: " + rel);
    require(it->second == bytes, "bytes differ: " + rel);
  }
  for (const char* f : {"chunks.jsonl", "index.fdix", "evidence.json", "draft_report.md", "debate_log.json",
                        "final_report.md", "analyses/risk_analyst.md"}) {
    require(ta.count(f) == 1, std::string("artifact missing: ") + f);
  }
  return std::to_string(ta.size()) + " artifacts identical";
}

// ---------------------------------------------------------------------------
// Report grammar

std::string check_grammar() {
  const auto golden = nlohmann::json::parse(read_file(fixture("report_golden.json")));
  std::size_t cases = 0;
  for (const auto& c : golden["cases"]) {
    const std::string name = c["name"];
    const auto got = parse_report(c["text"].get<std::string>()).recommendations;
    const auto& want = c["expected"];
    require(got.size() == want.size(), name + ": count");
    for (std::size_t i = 0; i < got.size(); ++i) {
      require(timeframe_name(got[i].timeframe) == want[i]["timeframe"].get<std::string>(), name + ": timeframe");
      require(position_name(got[i].position) == want[i]["position"].get<std::string>(), name + ": position");
      const std::optional<int> conv =
          want[i]["conviction_pct"].is_null() ? std::nullopt : std::optional<int>(want[i]["conviction_pct"].get<int>());
      require(got[i].conviction_pct == conv, name + ": conviction");
      if (want[i].contains("rationale")) require(got[i].rationale_excerpt == want[i]["rationale"], name + ": rationale");
    }
    ++cases;
  }
  require(cases >= 30, "fewer than 30 golden fixtures");

  std::mt19937 rng(99);
  static const char* const kPieces[] = {"1-DAY", "1-WEEK", "1-MONTH", "Position:", " LONG", " SHORT", " NEUTRAL",
                                        "Conviction:", "%", "\n", "\r\n", "**", "#", "- ", "[", "]", "12", ".5", " "};
  std::size_t with_recs = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    const std::size_t n = rng() % 60;
    for (std::size_t j = 0; j < n; ++j) {
      if (rng() % 3 == 0) {
        s.push_back(static_cast<char>(rng() % 256));
      } else {
        s += kPieces[rng() % std::size(kPieces)];
      }
    }
    try {
      if (!parse_report(s).recommendations.empty()) ++with_recs;
    } catch (...) {
      throw Failure{"parse_report raised on fuzz input " + std::to_string(i)};
    }
  }
  return std::to_string(cases) + " golden cases, 10000 fuzz inputs (" + std::to_string(with_recs) +
         " with recommendations)";
}

// ---------------------------------------------------------------------------
// Evaluation arithmetic

std::string check_compare() {
  // Per generator: integer score totals over 15 reports x 8 dimensions for
  // zero_shot, standard_rag, multi_agent, findebate (total = round(mean * 120)).
  struct Row {
    const char* model;
    int totals[4];
    const char* improvement;
    int means[4];
  };
  const Row rows[] = {
      {"GPT-4o", {356, 385, 407, 430}, "+0.61", {297, 321, 339, 358}},
      {"Gemini 2.5 Flash", {348, 378, 398, 420}, "+0.60", {290, 315, 332, 350}},
      {"Llama 4 Maverick", {338, 367, 389, 409}, "+0.59", {282, 306, 324, 341}},
      {"DeepSeek-R1", {332, 362, 372, 407}, "+0.62", {277, 302, 310, 339}},
      {"Claude Sonnet 4", {364, 392, 414, 437}, "+0.61", {303, 327, 345, 364}},
  };
  const std::vector<std::string> modes = {"zero_shot", "standard_rag", "multi_agent", "findebate"};
  std::vector<Scorecard> cards;
  for (const auto& row : rows) {
    for (std::size_t m = 0; m < 4; ++m) {
      for (int r = 0; r < 15; ++r) {
        std::map<EvalDimension, int> scores;
        for (std::size_t d = 0; d < 8; ++d) {
          const int slot = r * 8 + static_cast<int>(d);
          // Spread the total as evenly as possible over the 120 integer scores.
          scores[kAllEvalDimensions[d]] = row.totals[m] / 120 + (slot < row.totals[m] % 120 ? 1 : 0);
        }
        cards.push_back(make_scorecard(std::string(row.model) + "/" + modes[m] + "/" + std::to_string(r), modes[m],
                                       scores, "judge", row.model));
      }
    }
  }
  const auto stored = scorecards_from_json(nlohmann::json::parse(scorecards_to_json(cards).dump()));
  std::string got;
  for (const auto& row : rows) {
    std::vector<Scorecard> mine;
    for (const auto& c : stored) {
      if (c.generator_model == row.model) mine.push_back(c);
    }
    const auto cmp = compare_modes(mine, modes);
    for (std::size_t m = 0; m < 4; ++m) {
      require(cmp.summary(modes[m]).mean_centi == row.means[m], std::string(row.model) + " mean for " + modes[m]);
    }
    const std::string imp = format_improvement(cmp.improvement_centi);
    require(imp == row.improvement, std::string(row.model) + ": got " + imp + ", want " + row.improvement);
    got += (got.empty() ? "" : " ") + imp;
  }
  const auto table = render_comparison_table(stored, modes);
  require(table.find("+0.62") != std::string::npos, "table lacks the DeepSeek-R1 row");
  return got;
}

// ---------------------------------------------------------------------------
// Judge

std::string check_judge() {
  auto chat = std::make_shared<MockChatBackend>(3, "mock-judge");
  ModelGateway gw(chat, nullptr, quiet_options());
  const std::string report = mock_report_text("Source digest: judge");
  const auto card = score_report("r1", "findebate", report, read_file(fixture("abm_q3_2021_call.md")), gw);
  require(card.scores.size() == 8, "not all dimensions scored");
  for (auto d : kAllEvalDimensions) require(card.scores.count(d) == 1, "missing " + std::string(dimension_name(d)));
  require(card.mean >= 1.0 && card.mean <= 4.0, "mean out of range");
  require(chat->call_count() == 8, "expected one judge call per dimension");

  auto bad = std::make_shared<MockChatBackend>();
  bad->set_reply("*", "7");
  ModelGateway bad_gw(bad, nullptr, quiet_options());
  bool rejected = false;
  try {
    judge_dimension(report, "transcript", EvalDimension::kCoherence, bad_gw);
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::kUnparseableVerdict;
  }
  require(rejected, "out-of-range verdict accepted");
  require(bad->call_count() == 2, "expected exactly one retry");
  std::ostringstream msg;
  msg << "mean " << card.mean << ", verdict 7 rejected after 1 retry";
  return msg.str();
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;  // 0 = no runtime bound
    std::function<std::string()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"segmenter_suite", 10, check_segmenter},
      {"vector_index_oracle", 5, check_index},
      {"retrieval_dedup", 0, check_retrieval},
      {"debate_safety", 30, check_debate_safety},
      {"debate_path_coverage", 0, check_debate_paths},
      {"offline_determinism", 20, check_determinism},
      {"report_grammar", 0, check_grammar},
      {"evaluation_arithmetic", 0, check_compare},
      {"judge_harness", 0, check_judge},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.fn();
    } catch (const Failure& f) {
      ok = false;
      detail = f.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && c.budget_s > 0 && secs >= c.budget_s) {
      ok = false;
      detail += " (over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget)";
    }
    char timing[32];
    std::snprintf(timing, sizeof(timing), "%.2fs", secs);
    std::cout << (ok ? "PASS " : "FAIL ") << c.name << " [" << timing << "] " << detail << std::endl;
    if (!ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
