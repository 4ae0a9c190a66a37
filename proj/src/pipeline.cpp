#include "findebate/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <functional>

#include <json.hpp>

#include "findebate/agents.hpp"
#include "findebate/backends.hpp"
#include "findebate/error.hpp"
#include "findebate/hashing.hpp"
#include "findebate/json_io.hpp"
#include "findebate/retrieval.hpp"
#include "findebate/segmenter.hpp"
#include "findebate/transcript.hpp"
#include "findebate/vector_index.hpp"

namespace fs = std::filesystem;

namespace findebate {
namespace {

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path fresh_run_dir(const fs::path& parent) {
  fs::create_directories(parent);
  const std::string stamp = utc_stamp();
  fs::path dir = parent / stamp;
  for (int n = 2; fs::exists(dir); ++n) dir = parent / (stamp + "-" + std::to_string(n));
  fs::create_directories(dir);
  return dir;
}

void point_latest(const fs::path& run_dir) {
  const fs::path link = run_dir.parent_path() / "latest";
  const fs::path tmp = run_dir.parent_path() / ".latest.tmp";
  std::error_code ec;
  fs::remove(tmp, ec);
  fs::create_directory_symlink(run_dir.filename(), tmp, ec);
  if (!ec) fs::rename(tmp, link, ec);
}

std::vector<AgentSpec> with_params(std::vector<AgentSpec> specs, const RunConfig& cfg) {
  for (auto& s : specs) s.params = cfg.params_for(role_tag(s.role));
  return specs;
}

nlohmann::json artifact_digests(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  nlohmann::json out = nlohmann::json::object();
  for (const auto& f : files) out[fs::relative(f, dir).generic_string()] = sha256_hex(read_file(f));
  return out;
}

void write_report(const fs::path& dir, const std::string& markdown) {
  write_file(dir / "final_report.md", markdown);
  write_file(dir / "final_recommendations.json", recommendations_json(parse_report(markdown).recommendations));
}

// Collects the manifest while stages run.
class RunRecorder {
 public:
  void stage(const std::string& name, const std::function<void()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const std::exception& e) {
      stages_.push_back({{"name", name}, {"status", "failed"}});
      failure_ = {{"stage", name}, {"error", e.what()}};
      timings_[name] = elapsed(start);
      throw;
    }
    stages_.push_back({{"name", name}, {"status", "ok"}});
    timings_[name] = elapsed(start);
  }

  nlohmann::json& counts() { return counts_; }
  nlohmann::json& timings() { return timings_; }
  const nlohmann::json& stages() const { return stages_; }
  const nlohmann::json& failure() const { return failure_; }

 private:
  static std::int64_t elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  }

  nlohmann::json stages_ = nlohmann::json::array();
  nlohmann::json failure_ = nullptr;
  nlohmann::json counts_ = nlohmann::json::object();
  nlohmann::json timings_ = nlohmann::json::object();
};

struct Indexed {
  std::vector<Chunk> chunks;
  std::optional<VectorIndex> index;
};

Indexed build_index(const TranscriptDocument& doc, const RunConfig& cfg, ModelGateway& gw, const fs::path& dir,
                    RunRecorder& rec) {
  Indexed out;
  std::vector<EmbeddingVector> vectors;
  rec.stage("segment", [&] {
    out.chunks = segment_document(doc, cfg.segmenter);
    write_chunks_jsonl(out.chunks, dir / "chunks.jsonl");
    rec.counts()["chunks"] = out.chunks.size();
  });
  rec.stage("embed", [&] {
    std::vector<std::string> texts;
    for (const auto& c : out.chunks) texts.push_back(c.text);
    vectors = gw.embed_all(texts);
  });
  rec.stage("index", [&] {
    if (vectors.empty()) throw Error(ErrorCode::kEmptyIndex, "transcript produced no chunks");
    VectorIndex index(vectors.front().dim(), vectors.front().model_id);
    std::vector<EmbeddedChunk> items;
    for (std::size_t i = 0; i < out.chunks.size(); ++i) items.push_back({out.chunks[i], std::move(vectors[i])});
    rec.counts()["index_adds"] = index.add(items);
    index.persist(dir / "index.fdix");
    out.index.emplace(std::move(index));
  });
  return out;
}

}  // namespace

GatewayOptions gateway_options(const RunConfig& cfg) {
  GatewayOptions o;
  o.retry.max_attempts = cfg.retry_attempts;
  o.retry.initial_backoff = std::chrono::milliseconds(cfg.retry_backoff_ms);
  o.max_inflight = cfg.max_inflight;
  o.max_embed_batch = cfg.max_embed_batch;
  return o;
}

Backends make_backends(const RunConfig& cfg, bool offline) {
  Backends b;
  if (offline || cfg.provider == "mock") {
    b.chat = std::make_shared<MockChatBackend>(cfg.mock_seed);
  } else {
    b.chat = std::make_shared<HttpChatBackend>(
        HttpEndpoint{cfg.base_url, cfg.chat_model, api_key_from_env(), cfg.http_timeout_s});
  }
  if (offline || cfg.embed_provider == "offline") {
    b.embed = std::make_shared<OfflineEmbedder>(cfg.embed_dim);
  } else {
    b.embed = std::make_shared<HttpEmbeddingBackend>(
        HttpEndpoint{cfg.base_url, cfg.embed_model, api_key_from_env(), cfg.http_timeout_s});
  }
  return b;
}

std::shared_ptr<ChatBackend> make_judge_backend(const RunConfig& cfg, bool offline) {
  if (offline || cfg.judge_provider == "mock") return std::make_shared<MockChatBackend>(cfg.mock_seed, "mock-judge");
  return std::make_shared<HttpChatBackend>(HttpEndpoint{cfg.judge_base_url.empty() ? cfg.base_url : cfg.judge_base_url,
                                                        cfg.judge_model, api_key_from_env(), cfg.http_timeout_s});
}

std::vector<std::string> mode_stages(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::kZeroShot: return {"parse", "generate"};
    case PipelineMode::kStandardRag: return {"parse", "segment", "embed", "index", "retrieve", "generate"};
    case PipelineMode::kMultiAgentNoDebate:
      return {"parse", "segment", "embed", "index", "retrieve", "analyze", "generate"};
    case PipelineMode::kFinDebate:
      return {"parse", "segment", "embed", "index", "retrieve", "analyze", "generate", "debate"};
  }
  return {};
}

RunResult run_pipeline(const fs::path& transcript_path, const RunConfig& cfg, const Backends& backends) {
  cfg.validate();
  const std::string raw = read_file(transcript_path);
  RunResult result;
  result.mode = cfg.mode;
  result.doc_id = doc_fingerprint(raw);
  result.run_dir = fresh_run_dir(cfg.out_dir / result.doc_id / std::string(mode_name(cfg.mode)));
  const fs::path& dir = result.run_dir;
  const std::string started_at = utc_stamp();

  ModelGateway gw(backends.chat, backends.embed, gateway_options(cfg));
  RunRecorder rec;
  rec.counts()["index_adds"] = 0;
  rec.counts()["index_searches"] = 0;
  nlohmann::json agent_ms = nlohmann::json::object();
  nlohmann::json debate_ms = nlohmann::json::array();

  auto write_manifest = [&] {
    const GatewayStats stats = gw.stats();
    auto& counts = rec.counts();
    counts["chat_calls"] = stats.chat_calls;
    counts["chat_attempts"] = stats.chat_attempts;
    counts["embed_calls"] = stats.embed_calls;
    counts["embedded_texts"] = stats.embedded_texts;
    counts["truncated_responses"] = stats.truncated_responses;
    nlohmann::json m;
    m["manifest_version"] = 1;
    m["doc_id"] = result.doc_id;
    m["mode"] = mode_name(cfg.mode);
    m["transcript"] = {{"file", transcript_path.filename().string()}, {"sha256", result.doc_id}};
    m["config"] = config_to_json(cfg);
    m["models"] = {{"chat", gw.chat_model_id()}, {"embed", gw.embed_model_id()}};
    m["stages"] = rec.stages();
    m["status"] = rec.failure().is_null() ? "ok" : "failed";
    m["failure"] = rec.failure();
    m["counts"] = counts;
    m["debate_outcome"] = result.debate_outcome ? nlohmann::json(outcome_name(*result.debate_outcome)) : nullptr;
    m["artifacts"] = artifact_digests(dir);
    m["run_info"] = {{"started_at", started_at},
                     {"finished_at", utc_stamp()},
                     {"run_dir", dir.string()},
                     {"stage_elapsed_ms", rec.timings()},
                     {"agent_elapsed_ms", agent_ms},
                     {"debate_elapsed_ms", debate_ms}};
    write_file(dir / "manifest.json", m.dump(2) + "\n");
    point_latest(dir);
  };

  try {
    write_file(dir / "transcript.md", normalize_newlines(raw));
    TranscriptDocument doc;
    rec.stage("parse", [&] {
      doc = parse_transcript(raw);
      rec.counts()["turns"] = doc.turn_count();
    });

    if (cfg.mode == PipelineMode::kZeroShot) {
      rec.stage("generate", [&] {
        AgentSpec spec = zero_shot_spec();
        spec.params = cfg.params_for("zero_shot");
        ChatRequest req = compose_prompt(spec, {{"title", doc.title},
                                                {"ticker", doc.ticker.value_or("n/a")},
                                                {"doc_id", doc.doc_id},
                                                {"transcript", doc.raw_text}});
        req.role_tag = "zero_shot";
        write_report(dir, gw.chat(req));
      });
    } else {
      Indexed built = build_index(doc, cfg, gw, dir, rec);
      const VectorIndex& index = *built.index;
      const auto bank = cfg.query_bank.empty() ? default_query_bank() : load_query_bank(cfg.query_bank);
      EvidenceBundle bundle;
      std::string evidence_text;

      rec.stage("retrieve", [&] {
        if (cfg.mode == PipelineMode::kStandardRag) {
          std::string query = doc.title;
          for (const auto& q : bank.front().queries) query += ", " + q;
          const auto qv = gw.embed({query});
          bundle.doc_id = doc.doc_id;
          bundle.per_dimension.push_back({"Composite query", index.search(qv.front(), cfg.standard_rag_top_k)});
          bundle.flattened = bundle.per_dimension.front().hits;
          rec.counts()["index_searches"] = 1;
        } else {
          bundle = retrieve_evidence(index, bank, gw, cfg.k_per_dimension);
          std::size_t searches = 0;
          for (const auto& d : bank) searches += d.queries.size();
          rec.counts()["index_searches"] = searches;
        }
        evidence_text = render_evidence(bundle, cfg.evidence_budget);
        write_file(dir / "evidence.json", evidence_to_json(bundle).dump(2) + "\n");
        write_file(dir / "evidence.txt", evidence_text);
      });

      if (cfg.mode == PipelineMode::kStandardRag) {
        rec.stage("generate", [&] {
          AgentSpec spec = standard_rag_spec();
          spec.params = cfg.params_for("standard_rag");
          ChatRequest req = compose_prompt(spec, evidence_text, doc);
          req.role_tag = "standard_rag";
          write_report(dir, gw.chat(req));
        });
      } else {
        const auto specs = with_params(builtin_agent_specs(), cfg);
        std::vector<AgentAnalysis> analyses;
        DraftReport draft;
        rec.stage("analyze", [&] {
          analyses = run_agents(specs, bundle, doc, gw, cfg.evidence_budget);
          for (const auto& a : analyses) agent_ms[std::string(role_tag(a.role))] = a.elapsed_ms;
        });
        rec.stage("generate", [&] {
          draft = synthesize_report(analyses, bundle, doc, gw, find_spec(specs, AgentRole::kSynthesizer),
                                    cfg.evidence_budget);
          write_agent_artifacts(dir, draft);
          if (cfg.mode == PipelineMode::kMultiAgentNoDebate) write_report(dir, draft.markdown);
        });
        if (cfg.mode == PipelineMode::kFinDebate) {
          rec.stage("debate", [&] {
            DebateOptions opts{cfg.debate_rounds, cfg.thresholds};
            const DebateSession session =
                run_safe_debate(draft.report, analyses, gw, opts, with_params(debate_agent_specs(), cfg));
            result.debate_outcome = session.outcome;
            for (const auto& e : session.log) {
              debate_ms.push_back({{"phase", phase_name(e.phase)}, {"round", e.round}, {"elapsed_ms", e.elapsed_ms}});
            }
            write_file(dir / "debate_log.json", debate_log_json(session).dump(2) + "\n");
            write_file(dir / "debate_report.md", render_debate_report(session));
            write_report(dir, session.final_report().markdown);
          });
        }
      }
    }
  } catch (...) {
    write_manifest();
    throw;
  }
  write_manifest();
  return result;
}

fs::path ingest_transcript(const fs::path& transcript_path, const RunConfig& cfg, const Backends& backends) {
  cfg.validate();
  const std::string raw = read_file(transcript_path);
  const TranscriptDocument doc = parse_transcript(raw);
  const fs::path dir = cfg.out_dir / doc.doc_id / "index";
  fs::create_directories(dir);
  write_file(dir / "transcript.md", doc.raw_text);
  ModelGateway gw(backends.chat, backends.embed, gateway_options(cfg));
  RunRecorder rec;
  build_index(doc, cfg, gw, dir, rec);
  return dir;
}

DebateRunResult run_debate_files(const fs::path& report_path, const std::optional<fs::path>& analyses_dir,
                                 const fs::path& out_dir, const RunConfig& cfg, const Backends& backends) {
  cfg.validate();
  const StructuredReport r0 = parse_report(read_file(report_path));
  std::vector<AgentAnalysis> analyses;
  if (analyses_dir) {
    const fs::path nested = *analyses_dir / "analyses";
    analyses = read_analyses(fs::is_directory(nested) ? nested : *analyses_dir);
  }
  ModelGateway gw(backends.chat, backends.embed, gateway_options(cfg));
  DebateRunResult out;
  out.out_dir = out_dir;
  out.session = run_safe_debate(r0, analyses, gw, DebateOptions{cfg.debate_rounds, cfg.thresholds},
                                with_params(debate_agent_specs(), cfg));
  fs::create_directories(out_dir);
  write_file(out_dir / "debate_log.json", debate_log_json(out.session).dump(2) + "\n");
  write_file(out_dir / "debate_report.md", render_debate_report(out.session));
  write_report(out_dir, out.session.final_report().markdown);
  return out;
}

std::vector<fs::path> find_run_dirs(const fs::path& root) {
  std::vector<fs::path> out;
  auto is_run = [](const fs::path& p) {
    return fs::is_regular_file(p / "manifest.json") && fs::is_regular_file(p / "final_report.md");
  };
  if (is_run(root)) return {root};
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_symlink()) continue;
    if (it->is_directory() && is_run(it->path())) out.push_back(it->path());
  }
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot walk " + root.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace findebate
