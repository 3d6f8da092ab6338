#include "forge/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "forge/dedup.hpp"
#include "forge/document.hpp"
#include "forge/error.hpp"
#include "forge/io.hpp"
#include "forge/langid.hpp"
#include "forge/mteval.hpp"
#include "forge/normalize.hpp"
#include "forge/pipeline.hpp"
#include "forge/quality.hpp"
#include "forge/report.hpp"
#include "forge/version.hpp"

namespace forge::cli {

namespace {

namespace fs = std::filesystem;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("forge");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("FORGE_LOG")) {
    const std::string_view name(level);
    if (name == "error") {
      spdlog::set_level(spdlog::level::err);
    } else if (name == "debug") {
      spdlog::set_level(spdlog::level::debug);
    } else if (name != "info") {
      spdlog::warn("ignoring FORGE_LOG={} (expected error|info|debug)", name);
    }
  }
}

// Options shared by the corpus-transforming subcommands.
struct CorpusIo {
  std::vector<std::string> inputs;
  std::string output = "-";
  std::string report;
  std::string config;
  unsigned workers = default_workers();
};

void add_corpus_io(CLI::App* cmd, CorpusIo& io, bool config_flag = true, bool in_required = true) {
  auto* in = cmd->add_option("--in", io.inputs, "Input JSONL files or glob patterns ('-' for stdin)");
  if (in_required) in->required();
  cmd->add_option("--out", io.output, "Output JSONL ('-' for stdout)")->capture_default_str();
  cmd->add_option("--report", io.report, "Write a JSON accounting report here");
  if (config_flag) cmd->add_option("--config", io.config, "Pipeline config JSON to take stage settings from");
  cmd->add_option("--workers", io.workers, "Worker threads for per-document work")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

Corpus read_inputs(const std::vector<std::string>& patterns) {
  if (patterns.size() == 1 && patterns.front() == "-") return read_jsonl(std::cin, "<stdin>");
  const auto paths = io::expand_globs(patterns);
  spdlog::debug("reading {} input file(s)", paths.size());
  return read_jsonl_files(paths);
}

PipelineConfig config_for(const CorpusIo& io) {
  PipelineConfig cfg = io.config.empty() ? PipelineConfig{} : load_pipeline_config(io.config);
  cfg.workers = io.workers;
  return cfg;
}

PipelineReport report_for(const Corpus& input, const Corpus& output, std::vector<StageReport> stages) {
  PipelineReport report;
  for (const auto& s : input.manifest()) {
    SourceTokens row{s.source, s.tokens, 0};
    for (const auto& m : output.manifest()) {
      if (m.source == s.source) row.final_tokens = m.tokens;
    }
    report.sources.push_back(row);
  }
  report.stages = std::move(stages);
  return report;
}

void log_stage(const StageReport& r) {
  spdlog::info("{}: {} -> {} docs, {} -> {} tokens", r.stage, r.docs_in, r.docs_out, r.tokens_in,
               r.tokens_out);
  for (const auto& [reason, count] : r.drop_reasons) spdlog::debug("  {}: {}", reason, count);
}

// Stages all outputs and commits them together once everything succeeded.
void emit(const CorpusIo& io, const Corpus& input, const Corpus& output, std::vector<StageReport> stages) {
  for (const auto& s : stages) log_stage(s);
  std::optional<io::StagedFile> report_file;
  if (!io.report.empty()) {
    report_file.emplace(io.report);
    report_file->stream() << render_report(report_for(input, output, std::move(stages)), ReportFormat::Json);
  }
  io::StagedFile out(io.output);
  write_jsonl(output, out.stream());
  out.commit();
  if (report_file) report_file->commit();
}

std::vector<StageReport> flatten(StageReport report) {
  if (report.phases.empty()) return {std::move(report)};
  return std::move(report.phases);
}

std::pair<std::string, std::string> split_hyp(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
    throw ConfigError("--hyp expects <name>=<file>, got \"" + arg + "\"");
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

}  // namespace

int run(int argc, const char* const* argv) {
  setup_logging();

  CLI::App app{"forge: corpus curation pipeline and MT evaluation toolkit", "forge"};
  app.set_version_flag("--version", std::string("forge ") + std::string(version()));
  app.require_subcommand(1);

  // ingest
  CorpusIo ingest_io;
  auto* ingest = app.add_subcommand("ingest", "Validate and merge JSONL inputs into one corpus");
  add_corpus_io(ingest, ingest_io, false);

  // lang
  CorpusIo lang_io;
  std::optional<double> lang_threshold;
  auto* lang = app.add_subcommand("lang", "Keep documents whose target-script score meets the threshold");
  add_corpus_io(lang, lang_io);
  lang->add_option("--threshold", lang_threshold, "Minimum language score (default 0.9)")->check(CLI::Range(0.0, 1.0));

  // normalize
  CorpusIo norm_io;
  std::string norm_table;
  std::optional<std::size_t> norm_target;
  auto* normalize = app.add_subcommand("normalize", "Standardize characters; optionally split to a context length");
  add_corpus_io(normalize, norm_io);
  normalize->add_option("--table", norm_table, "Character table JSON (default: bundled Urdu table)");
  normalize->add_option("--target", norm_target, "Also split documents to this many tokens")->check(CLI::PositiveNumber);

  // quality
  CorpusIo quality_io;
  std::string stopwords_path, flagged_path, pii_path;
  std::optional<double> stop_threshold, flagged_threshold;
  std::optional<std::size_t> min_tokens;
  bool no_pii = false;
  auto* quality = app.add_subcommand("quality", "Drop low-quality documents, then scrub PII");
  add_corpus_io(quality, quality_io);
  quality->add_option("--stopwords", stopwords_path, "Stopword list, one word per line");
  quality->add_option("--flagged", flagged_path, "Flagged-word list, one word per line");
  quality->add_option("--pii", pii_path, "PII rules JSON (default: bundled EMAIL/ID/PHONE rules)");
  quality->add_flag("--no-pii", no_pii, "Skip PII scrubbing");
  quality->add_option("--stopword-threshold", stop_threshold, "Minimum stopword ratio (default 0.1)")
      ->check(CLI::Range(0.0, 1.0));
  quality->add_option("--flagged-threshold", flagged_threshold, "Maximum flagged-word ratio (default 0.025)")
      ->check(CLI::Range(0.0, 1.0));
  quality->add_option("--min-tokens", min_tokens, "Documents with fewer tokens are dropped as empty");

  // dedup
  CorpusIo dedup_io;
  std::optional<std::string> dedup_mode;
  std::optional<int> hamming;
  std::optional<std::size_t> shingle;
  bool no_per_source = false, no_overall = false, no_lines = false;
  std::string fps_in, fps_out;
  auto* dedup = app.add_subcommand("dedup", "Per-source, overall and in-document deduplication");
  add_corpus_io(dedup, dedup_io);
  dedup->add_option("--mode", dedup_mode, "exact|near (default exact)")->check(CLI::IsMember({"exact", "near"}));
  dedup->add_option("--hamming", hamming, "Near mode: max Hamming distance (default 3)")->check(CLI::Range(0, 64));
  dedup->add_option("--shingle", shingle, "Shingle width in characters (default 4)")->check(CLI::PositiveNumber);
  dedup->add_flag("--no-per-source", no_per_source, "Skip the per-source phase");
  dedup->add_flag("--no-overall", no_overall, "Skip the overall phase");
  dedup->add_flag("--no-lines", no_lines, "Skip line deduplication");
  dedup->add_option("--fps-in", fps_in, "Fingerprint sidecar from an earlier run");
  dedup->add_option("--fps-out", fps_out, "Write fingerprints of surviving documents");

  // split
  CorpusIo split_io;
  std::optional<std::size_t> split_target;
  std::vector<std::string> boundaries;
  auto* split = app.add_subcommand("split", "Split documents to a target context length");
  add_corpus_io(split, split_io);
  split->add_option("--target", split_target, "Target tokens per chunk (default 512)")->check(CLI::PositiveNumber);
  split->add_option("--boundary", boundaries, "Boundary preference, highest first (paragraph, sentence, whitespace)")
      ->check(CLI::IsMember({"paragraph", "sentence", "whitespace"}));

  // run
  CorpusIo run_io;
  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline");
  // --in is checked after the config loads so a bad config path is reported first.
  add_corpus_io(run_cmd, run_io, true, false);
  run_cmd->get_option("--config")->required();

  // report
  std::string report_in, report_format = "table", report_out = "-";
  auto* report = app.add_subcommand("report", "Render a saved JSON report");
  report->add_option("--report", report_in, "JSON report written by run or a stage subcommand")->required();
  report->add_option("--format", report_format, "table|json")->check(CLI::IsMember({"table", "json"}))->capture_default_str();
  report->add_option("--out", report_out, "Output path ('-' for stdout)")->capture_default_str();

  // bleu
  std::string refs_path, bleu_smoothing = "epsilon", bleu_format = "table", bleu_out = "-", bleu_name;
  std::vector<std::string> hyps;
  auto* bleu = app.add_subcommand("bleu", "Corpus BLEU of one or more systems against a reference file");
  bleu->add_option("--refs", refs_path, "Reference file, one segment per line")->required();
  bleu->add_option("--hyp", hyps, "System output as <name>=<file>; repeatable")->required();
  bleu->add_option("--name", bleu_name, "Eval set name (default: reference file stem)");
  bleu->add_option("--smoothing", bleu_smoothing, "none|epsilon")->check(CLI::IsMember({"none", "epsilon"}))->capture_default_str();
  bleu->add_option("--format", bleu_format, "table|json")->check(CLI::IsMember({"table", "json"}))->capture_default_str();
  bleu->add_option("--out", bleu_out, "Output path ('-' for stdout)")->capture_default_str();

  // compare
  std::vector<std::string> manifests;
  std::string cmp_smoothing = "epsilon", cmp_format = "table", cmp_out = "-";
  auto* compare = app.add_subcommand("compare", "Compare systems across several eval sets");
  compare->add_option("--manifest", manifests, "Eval set manifest JSON; repeatable")->required();
  compare->add_option("--smoothing", cmp_smoothing, "none|epsilon")->check(CLI::IsMember({"none", "epsilon"}))->capture_default_str();
  compare->add_option("--format", cmp_format, "table|json")->check(CLI::IsMember({"table", "json"}))->capture_default_str();
  compare->add_option("--out", cmp_out, "Output path ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << "forge " << version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "forge: " << e.what() << "\n";
    if (!app.get_subcommands().empty()) {
      std::cerr << "run 'forge " << app.get_subcommands().front()->get_name() << " --help' for usage\n";
    } else {
      std::cerr << "run 'forge --help' for usage\n";
    }
    return kExitUsage;
  }

  try {
    if (*ingest) {
      const Corpus corpus = read_inputs(ingest_io.inputs);
      StageReport r = StageReport::start("ingest", corpus);
      r.finish(corpus);
      emit(ingest_io, corpus, corpus, {r});
    } else if (*lang) {
      PipelineConfig cfg = config_for(lang_io);
      if (lang_threshold) cfg.lang.threshold = *lang_threshold;
      cfg.lang.validate();
      const Corpus input = read_inputs(lang_io.inputs);
      auto result = filter_language(input, cfg.lang, {cfg.workers});
      emit(lang_io, input, result.corpus, {result.report});
    } else if (*normalize) {
      PipelineConfig cfg = config_for(norm_io);
      if (!norm_table.empty()) cfg.table = CharMapTable::load(norm_table);
      if (norm_target) cfg.split.target_tokens = *norm_target;
      const Corpus input = read_inputs(norm_io.inputs);
      auto result = standardize_corpus(input, cfg.table, {cfg.workers});
      std::vector<StageReport> stages{result.report};
      if (norm_target) {
        result = split_corpus(result.corpus, cfg.split, {cfg.workers});
        stages.push_back(result.report);
      }
      emit(norm_io, input, result.corpus, std::move(stages));
    } else if (*quality) {
      PipelineConfig cfg = config_for(quality_io);
      if (!stopwords_path.empty()) cfg.quality.stopword_list = load_word_list(stopwords_path, cfg.table);
      if (!flagged_path.empty()) cfg.quality.flagged_list = load_word_list(flagged_path, cfg.table);
      if (!pii_path.empty()) cfg.pii = PiiRuleSet::load(pii_path);
      if (stop_threshold) cfg.quality.stopword_threshold = *stop_threshold;
      if (flagged_threshold) cfg.quality.flagged_threshold = *flagged_threshold;
      if (min_tokens) cfg.quality.min_tokens = *min_tokens;
      cfg.quality.validate();
      const Corpus input = read_inputs(quality_io.inputs);
      auto filtered = filter_quality(input, cfg.quality, {cfg.workers});
      std::vector<StageReport> stages{filtered.report};
      if (!no_pii) {
        filtered = scrub_corpus(filtered.corpus, cfg.pii, {cfg.workers});
        stages.push_back(filtered.report);
      }
      emit(quality_io, input, filtered.corpus, std::move(stages));
    } else if (*dedup) {
      PipelineConfig cfg = config_for(dedup_io);
      if (dedup_mode) cfg.dedup.mode = parse_dedup_mode(*dedup_mode);
      if (hamming) cfg.dedup.hamming_threshold = *hamming;
      if (shingle) cfg.dedup.shingle_width = *shingle;
      cfg.dedup.validate();
      DedupPassOptions options;
      options.exec.workers = cfg.workers;
      options.per_source = cfg.dedup_per_source && !no_per_source;
      options.overall = cfg.dedup_overall && !no_overall;
      options.lines = cfg.dedup_lines && !no_lines;
      if (!fps_in.empty()) options.prior = read_fingerprints(fps_in);
      const Corpus input = read_inputs(dedup_io.inputs);
      auto result = dedup_pass(input, cfg.dedup, options);
      std::optional<io::StagedFile> fps_file;
      if (!fps_out.empty()) {
        fps_file.emplace(fps_out);
        write_fingerprints(fingerprint_corpus(result.corpus, cfg.dedup, {cfg.workers}), fps_file->stream());
      }
      emit(dedup_io, input, result.corpus, flatten(std::move(result.report)));
      if (fps_file) fps_file->commit();
    } else if (*split) {
      PipelineConfig cfg = config_for(split_io);
      if (split_target) cfg.split.target_tokens = *split_target;
      if (!boundaries.empty()) {
        cfg.split.boundary_preference.clear();
        for (const auto& b : boundaries) cfg.split.boundary_preference.push_back(parse_boundary(b));
      }
      const Corpus input = read_inputs(split_io.inputs);
      auto result = split_corpus(input, cfg.split, {cfg.workers});
      emit(split_io, input, result.corpus, {result.report});
    } else if (*run_cmd) {
      PipelineConfig cfg = config_for(run_io);
      if (run_io.inputs.empty()) throw ConfigError("run: --in is required");
      std::vector<fs::path> paths;
      Corpus input;
      if (run_io.inputs.size() == 1 && run_io.inputs.front() == "-") {
        input = read_jsonl(std::cin, "<stdin>", ReadOptions{{}, cfg.counter});
      } else {
        paths = io::expand_globs(run_io.inputs);
        try {
          input = read_jsonl_files(paths, ReadOptions{{}, cfg.counter});
        } catch (const DataError& e) {
          throw DataError(std::string("stage ingest: ") + e.what());
        }
      }
      const Corpus original = input;
      auto result = run_pipeline(std::move(input), cfg);
      for (const auto& s : result.report.stages) log_stage(s);
      std::optional<io::StagedFile> report_file;
      if (!run_io.report.empty()) {
        report_file.emplace(run_io.report);
        report_file->stream() << render_report(result.report, ReportFormat::Json);
      }
      io::StagedFile out(run_io.output);
      write_jsonl(result.corpus, out.stream());
      out.commit();
      if (report_file) report_file->commit();
      spdlog::info("{} -> {} tokens ({}% reduction)", original.total_tokens(), result.corpus.total_tokens(),
                   format_percentage(result.report.total().percentage_reduction()));
    } else if (*report) {
      const PipelineReport parsed = parse_report(io::read_file(report_in));
      io::StagedFile out(report_out);
      out.stream() << render_report(parsed, parse_report_format(report_format));
      out.commit();
    } else if (*bleu) {
      EvalSet set;
      set.name = bleu_name.empty() ? fs::path(refs_path).stem().string() : bleu_name;
      set.references = read_lines(refs_path);
      for (const auto& hyp_arg : hyps) {
        auto [name, path] = split_hyp(hyp_arg);
        set.systems.push_back(SystemOutputs{name, read_lines(path)});
      }
      const std::vector<EvalSet> sets{std::move(set)};
      const auto cmp = compare_systems(sets, parse_smoothing(bleu_smoothing));
      io::StagedFile out(bleu_out);
      out.stream() << render_comparison(cmp, parse_report_format(bleu_format));
      out.commit();
    } else if (*compare) {
      std::vector<EvalSet> sets;
      for (const auto& m : manifests) sets.push_back(load_eval_manifest(m));
      const auto cmp = compare_systems(sets, parse_smoothing(cmp_smoothing));
      io::StagedFile out(cmp_out);
      out.stream() << render_comparison(cmp, parse_report_format(cmp_format));
      out.commit();
    }
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  }
  return kExitOk;
}

}  // namespace forge::cli
