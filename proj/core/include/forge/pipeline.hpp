#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "forge/dedup.hpp"
#include "forge/document.hpp"
#include "forge/langid.hpp"
#include "forge/normalize.hpp"
#include "forge/quality.hpp"
#include "forge/report.hpp"

namespace forge {

struct PipelineConfig {
  bool lang_enabled = true;
  LangFilterConfig lang;

  bool normalize_enabled = true;
  CharMapTable table = CharMapTable::urdu_default();

  bool quality_enabled = true;
  QualityConfig quality;

  bool pii_enabled = true;
  PiiRuleSet pii = PiiRuleSet::defaults();

  bool dedup_enabled = true;
  bool dedup_per_source = true;
  bool dedup_overall = true;
  bool dedup_lines = true;
  DedupConfig dedup;

  bool split_enabled = true;
  SplitConfig split;

  unsigned workers = 1;
  TokenCounter counter = count_tokens;

  void validate() const;
};

// Stage names in execution order.
inline constexpr std::string_view kStageOrder[] = {
    "ingest",         "lang",          "standardize", "quality", "pii",
    "dedup_source",   "dedup_overall", "dedup_lines", "split",
};

// JSON with optional sections {lang, normalize, quality, pii, dedup, split},
// each with "enabled" and module keys, plus top-level "workers". Relative
// file paths resolve against base_dir. Unknown keys are rejected.
PipelineConfig parse_pipeline_config(std::string_view json_text,
                                     const std::filesystem::path& base_dir = {});
// Throws ConfigError naming the path when it cannot be read or parsed.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct PipelineResult {
  Corpus corpus;
  PipelineReport report;
};

// ingest -> lang -> standardize -> quality -> pii -> dedup_source ->
// dedup_overall -> dedup_lines -> split. Disabled stages report as
// identities. Errors are rethrown as DataError prefixed with the stage name.
PipelineResult run_pipeline(const std::vector<std::filesystem::path>& inputs,
                            const PipelineConfig& cfg);
PipelineResult run_pipeline(Corpus ingested, const PipelineConfig& cfg);

}  // namespace forge
