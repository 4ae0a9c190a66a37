// Command-line front end: ingest, analyze, debate, evaluate, compare.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "findebate/error.hpp"
#include "findebate/hashing.hpp"
#include "findebate/judge.hpp"
#include "findebate/pipeline.hpp"
#include "findebate/transcript.hpp"

namespace fs = std::filesystem;
using namespace findebate;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct Globals {
  std::string config_path;
  std::string mode;
  bool offline = false;
  std::string out;
  std::vector<std::string> overrides;
};

RunConfig build_config(const Globals& g) {
  RunConfig cfg;
  if (!g.config_path.empty()) apply_config_file(cfg, g.config_path);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kInvalidConfig, "--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!g.mode.empty()) set_config_value(cfg, "mode", g.mode);
  if (!g.out.empty()) cfg.out_dir = g.out;
  cfg.validate();
  return cfg;
}

std::vector<std::string> modes_present(const std::vector<Scorecard>& cards) {
  std::vector<std::string> out;
  for (PipelineMode m : all_modes()) {
    const std::string name(mode_name(m));
    for (const auto& c : cards) {
      if (c.mode == name) {
        out.push_back(name);
        break;
      }
    }
  }
  return out;
}

int cmd_evaluate(const RunConfig& cfg, bool offline, const std::vector<std::string>& paths) {
  ModelGateway judge(make_judge_backend(cfg, offline), nullptr, gateway_options(cfg));
  std::vector<Scorecard> cards;
  for (const auto& p : paths) {
    for (const auto& dir : find_run_dirs(p)) {
      const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
      const std::string mode = manifest.value("mode", std::string());
      const std::string report_id = manifest.value("doc_id", std::string()) + "/" + mode + "/" + dir.filename().string();
      std::string generator;
      if (manifest.contains("models")) generator = manifest["models"].value("chat", std::string());
      Scorecard card = score_report(report_id, mode, read_file(dir / "final_report.md"),
                                    read_file(dir / "transcript.md"), judge, generator);
      write_file(dir / "scorecard.json", scorecards_to_json({card}).dump(2) + "\n");
      std::printf("%s mean=%.3f\n", report_id.c_str(), card.mean);
      cards.push_back(std::move(card));
    }
  }
  if (cards.empty()) throw Error(ErrorCode::kPreconditionViolation, "no run directories found");
  const fs::path out = cfg.out_dir / "scorecards.json";
  write_file(out, scorecards_to_json(cards).dump(2) + "\n");
  std::printf("scorecards: %s\n", out.string().c_str());
  return 0;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& baseline, const std::string& target) {
  std::vector<Scorecard> cards;
  for (const auto& p : paths) {
    if (fs::is_regular_file(p)) {
      for (auto& c : scorecards_from_json(nlohmann::json::parse(read_file(p)))) cards.push_back(std::move(c));
      continue;
    }
    for (const auto& dir : find_run_dirs(p)) {
      if (!fs::exists(dir / "scorecard.json")) continue;
      for (auto& c : scorecards_from_json(nlohmann::json::parse(read_file(dir / "scorecard.json")))) {
        cards.push_back(std::move(c));
      }
    }
  }
  std::cout << render_comparison_table(cards, modes_present(cards), baseline, target);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Earnings-call report pipeline: retrieval, specialist agents, safe debate and judging."};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--mode", g.mode, "zero_shot | standard_rag | multi_agent | findebate");
  app.add_flag("--offline", g.offline, "use the deterministic mock chat backend and offline embedder");
  app.add_option("--out", g.out, "artifact root directory (default: runs)");
  app.add_option("--set", g.overrides, "override one config key, key=value (repeatable)");

  std::string transcript;
  auto* ingest = app.add_subcommand("ingest", "parse, segment, embed and persist an index for a transcript");
  ingest->add_option("transcript", transcript, "transcript file (.md or .txt)")->required()->check(CLI::ExistingFile);

  auto* analyze = app.add_subcommand("analyze", "run one pipeline mode on a transcript");
  analyze->add_option("transcript", transcript, "transcript file (.md or .txt)")->required()->check(CLI::ExistingFile);

  std::string report;
  std::string analyses_dir;
  auto* debate = app.add_subcommand("debate", "run the safe debate on an existing report");
  debate->add_option("report", report, "report markdown file")->required()->check(CLI::ExistingFile);
  debate->add_option("--analyses", analyses_dir, "directory of <role>.md analyses or a run directory")
      ->check(CLI::ExistingDirectory);

  std::vector<std::string> run_paths;
  auto* evaluate = app.add_subcommand("evaluate", "judge final reports of run directories");
  evaluate->add_option("runs", run_paths, "run directories or roots containing them")->required()->check(CLI::ExistingPath);

  std::vector<std::string> compare_paths;
  std::string baseline = "zero_shot";
  std::string target = "findebate";
  auto* compare = app.add_subcommand("compare", "compare mode means over scorecards");
  compare->add_option("inputs", compare_paths, "scorecards.json files or run directories")->required()->check(CLI::ExistingPath);
  compare->add_option("--baseline", baseline, "baseline mode");
  compare->add_option("--target", target, "target mode");

  for (auto* sub : {ingest, analyze, debate, evaluate, compare}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  RunConfig cfg;
  try {
    cfg = build_config(g);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::kInvalidConfig) {
      std::cerr << app.help();
      return kExitUsage;
    }
    return kExitRuntime;
  }

  try {
    if (*ingest) {
      const fs::path dir = ingest_transcript(transcript, cfg, make_backends(cfg, g.offline));
      std::printf("index: %s\n", dir.string().c_str());
    } else if (*analyze) {
      const RunResult r = run_pipeline(transcript, cfg, make_backends(cfg, g.offline));
      std::printf("run: %s\n", r.run_dir.string().c_str());
      if (r.debate_outcome) std::printf("outcome: %s\n", std::string(outcome_name(*r.debate_outcome)).c_str());
    } else if (*debate) {
      std::optional<fs::path> analyses;
      if (!analyses_dir.empty()) analyses = analyses_dir;
      const fs::path out = cfg.out_dir / "debate" / sha256_hex(read_file(report)).substr(0, 16);
      const DebateRunResult r = run_debate_files(report, analyses, out, cfg, make_backends(cfg, g.offline));
      std::printf("outcome: %s\n", std::string(outcome_name(r.session.outcome)).c_str());
      std::printf("out: %s\n", r.out_dir.string().c_str());
    } else if (*evaluate) {
      return cmd_evaluate(cfg, g.offline, run_paths);
    } else if (*compare) {
      return cmd_compare(compare_paths, baseline, target);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
