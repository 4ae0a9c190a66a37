#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "findebate/config.hpp"
#include "findebate/debate.hpp"
#include "findebate/gateway.hpp"

namespace findebate {

struct Backends {
  std::shared_ptr<ChatBackend> chat;
  std::shared_ptr<EmbeddingBackend> embed;
};

/// Mock/offline or HTTP backends as the config asks. `offline` forces mocks.
Backends make_backends(const RunConfig& cfg, bool offline);
std::shared_ptr<ChatBackend> make_judge_backend(const RunConfig& cfg, bool offline);
GatewayOptions gateway_options(const RunConfig& cfg);

/// Stage names a mode runs, in order. Each mode's list extends the previous one.
std::vector<std::string> mode_stages(PipelineMode mode);

struct RunResult {
  std::filesystem::path run_dir;
  std::string doc_id;
  PipelineMode mode = PipelineMode::kFinDebate;
  std::optional<DebateOutcome> debate_outcome;
};

/// Runs one mode on one transcript and writes
/// `<out_dir>/<doc_id>/<mode>/<UTC timestamp>/` plus a `latest` link beside it.
/// On failure manifest.json records the failing stage before the error is rethrown.
RunResult run_pipeline(const std::filesystem::path& transcript_path, const RunConfig& cfg, const Backends& backends);

/// Parse, segment, embed and persist: `<out_dir>/<doc_id>/index/` holding
/// transcript.md, chunks.jsonl and index.fdix. Returns that directory.
std::filesystem::path ingest_transcript(const std::filesystem::path& transcript_path, const RunConfig& cfg,
                                        const Backends& backends);

struct DebateRunResult {
  std::filesystem::path out_dir;
  DebateSession session;
};

/// Safe debate over an existing report file and an optional directory of
/// `<role_tag>.md` analyses; writes debate_log.json, debate_report.md,
/// final_report.md and final_recommendations.json into `out_dir`.
DebateRunResult run_debate_files(const std::filesystem::path& report_path,
                                 const std::optional<std::filesystem::path>& analyses_dir,
                                 const std::filesystem::path& out_dir, const RunConfig& cfg, const Backends& backends);

/// Run directories (holding manifest.json and final_report.md) below `root`,
/// sorted, `latest` links skipped.
std::vector<std::filesystem::path> find_run_dirs(const std::filesystem::path& root);

}  // namespace findebate
