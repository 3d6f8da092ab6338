#include "forge/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "forge/error.hpp"
#include "forge/unicode.hpp"

namespace forge {

using json = nlohmann::json;

void PipelineConfig::validate() const {
  lang.validate();
  quality.validate();
  dedup.validate();
  split.validate();
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

namespace {

void check_keys(const json& section, std::string_view name, std::initializer_list<std::string_view> allowed) {
  if (!section.is_object()) throw ConfigError("config section \"" + std::string(name) + "\" must be an object");
  for (const auto& [key, value] : section.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key \"" + key + "\" in config section \"" + std::string(name) + "\"");
    }
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

CodepointRange parse_range(const json& entry) {
  if (!entry.is_array() || entry.size() != 2) {
    throw ConfigError("script_ranges entries must be [\"U+XXXX\", \"U+YYYY\"] pairs");
  }
  const auto lo = unicode::parse_codepoint(entry[0].get<std::string>());
  const auto hi = unicode::parse_codepoint(entry[1].get<std::string>());
  if (!lo || !hi) throw ConfigError("bad codepoint in script_ranges: " + entry.dump());
  return CodepointRange{*lo, *hi};
}

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("pipeline config is not valid JSON: ") + e.what());
  }
  check_keys(j, "<top level>", {"workers", "lang", "normalize", "quality", "pii", "dedup", "split"});

  PipelineConfig cfg;
  try {
    cfg.workers = j.value("workers", 1u);

    if (j.contains("lang")) {
      const auto& s = j["lang"];
      check_keys(s, "lang", {"enabled", "threshold", "script_ranges"});
      cfg.lang_enabled = s.value("enabled", true);
      cfg.lang.threshold = s.value("threshold", cfg.lang.threshold);
      if (s.contains("script_ranges")) {
        cfg.lang.script_ranges.clear();
        for (const auto& entry : s["script_ranges"]) cfg.lang.script_ranges.push_back(parse_range(entry));
      }
    }

    if (j.contains("normalize")) {
      const auto& s = j["normalize"];
      check_keys(s, "normalize", {"enabled", "table"});
      cfg.normalize_enabled = s.value("enabled", true);
      if (s.contains("table")) cfg.table = CharMapTable::load(resolve(base_dir, s["table"].get<std::string>()));
    }

    if (j.contains("quality")) {
      const auto& s = j["quality"];
      check_keys(s, "quality",
                 {"enabled", "stopword_threshold", "flagged_threshold", "stopwords", "flagged", "min_tokens"});
      cfg.quality_enabled = s.value("enabled", true);
      cfg.quality.stopword_threshold = s.value("stopword_threshold", cfg.quality.stopword_threshold);
      cfg.quality.flagged_threshold = s.value("flagged_threshold", cfg.quality.flagged_threshold);
      cfg.quality.min_tokens = s.value("min_tokens", cfg.quality.min_tokens);
      if (s.contains("stopwords")) {
        cfg.quality.stopword_list = load_word_list(resolve(base_dir, s["stopwords"].get<std::string>()), cfg.table);
      }
      if (s.contains("flagged")) {
        cfg.quality.flagged_list = load_word_list(resolve(base_dir, s["flagged"].get<std::string>()), cfg.table);
      }
    }

    if (j.contains("pii")) {
      const auto& s = j["pii"];
      check_keys(s, "pii", {"enabled", "rules"});
      cfg.pii_enabled = s.value("enabled", true);
      if (s.contains("rules")) cfg.pii = PiiRuleSet::load(resolve(base_dir, s["rules"].get<std::string>()));
    }

    if (j.contains("dedup")) {
      const auto& s = j["dedup"];
      check_keys(s, "dedup", {"enabled", "mode", "hamming", "shingle_width", "per_source", "overall", "lines"});
      cfg.dedup_enabled = s.value("enabled", true);
      if (s.contains("mode")) cfg.dedup.mode = parse_dedup_mode(s["mode"].get<std::string>());
      cfg.dedup.hamming_threshold = s.value("hamming", cfg.dedup.hamming_threshold);
      cfg.dedup.shingle_width = s.value("shingle_width", cfg.dedup.shingle_width);
      cfg.dedup_per_source = s.value("per_source", true);
      cfg.dedup_overall = s.value("overall", true);
      cfg.dedup_lines = s.value("lines", true);
    }

    if (j.contains("split")) {
      const auto& s = j["split"];
      check_keys(s, "split", {"enabled", "target_tokens", "boundary_preference"});
      cfg.split_enabled = s.value("enabled", true);
      cfg.split.target_tokens = s.value("target_tokens", cfg.split.target_tokens);
      if (s.contains("boundary_preference")) {
        cfg.split.boundary_preference.clear();
        for (const auto& b : s["boundary_preference"]) {
          cfg.split.boundary_preference.push_back(parse_boundary(b.get<std::string>()));
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed pipeline config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read pipeline config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_pipeline_config(buffer.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

namespace {

StageResult identity(const Corpus& corpus, std::string_view name) {
  StageResult result{corpus, StageReport::start(std::string(name), corpus)};
  result.report.enabled = false;
  result.report.finish(result.corpus);
  return result;
}

template <class Fn>
StageResult run_stage(std::string_view name, bool enabled, const Corpus& corpus, Fn&& fn) {
  if (!enabled) return identity(corpus, name);
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw DataError("stage " + std::string(name) + ": " + e.what());
  }
}

}  // namespace

PipelineResult run_pipeline(const std::vector<std::filesystem::path>& inputs, const PipelineConfig& cfg) {
  Corpus ingested;
  try {
    ingested = read_jsonl_files(inputs, ReadOptions{{}, cfg.counter});
  } catch (const DataError& e) {
    throw DataError(std::string("stage ingest: ") + e.what());
  }
  return run_pipeline(std::move(ingested), cfg);
}

PipelineResult run_pipeline(Corpus ingested, const PipelineConfig& cfg) {
  cfg.validate();
  const ExecutionOptions exec{cfg.workers};
  PipelineReport report;
  for (const auto& s : ingested.manifest()) report.sources.push_back(SourceTokens{s.source, s.tokens, 0});

  StageReport ingest = StageReport::start("ingest", ingested);
  ingest.finish(ingested);
  report.stages.push_back(std::move(ingest));

  Corpus current = std::move(ingested);
  auto advance = [&](StageResult&& r) {
    current = std::move(r.corpus);
    report.stages.push_back(std::move(r.report));
  };

  advance(run_stage("lang", cfg.lang_enabled, current,
                    [&] { return filter_language(current, cfg.lang, exec); }));
  advance(run_stage("standardize", cfg.normalize_enabled, current,
                    [&] { return standardize_corpus(current, cfg.table, exec, cfg.counter); }));
  advance(run_stage("quality", cfg.quality_enabled, current,
                    [&] { return filter_quality(current, cfg.quality, exec); }));
  advance(run_stage("pii", cfg.pii_enabled, current,
                    [&] { return scrub_corpus(current, cfg.pii, exec, cfg.counter); }));

  DedupPassOptions dedup_options;
  dedup_options.exec = exec;
  dedup_options.per_source = cfg.dedup_enabled && cfg.dedup_per_source;
  dedup_options.overall = cfg.dedup_enabled && cfg.dedup_overall;
  dedup_options.lines = cfg.dedup_enabled && cfg.dedup_lines;
  dedup_options.counter = cfg.counter;
  StageResult dedup = run_stage("dedup", true, current, [&] { return dedup_pass(current, cfg.dedup, dedup_options); });
  current = std::move(dedup.corpus);
  for (auto& phase : dedup.report.phases) report.stages.push_back(std::move(phase));

  advance(run_stage("split", cfg.split_enabled, current,
                    [&] { return split_corpus(current, cfg.split, exec, cfg.counter); }));

  for (auto& s : report.sources) {
    for (const auto& m : current.manifest()) {
      if (m.source == s.source) s.final_tokens = m.tokens;
    }
  }
  return PipelineResult{std::move(current), std::move(report)};
}

}  // namespace forge
