#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "forge/document.hpp"

namespace forge {

struct DropRecord {
  std::string id;
  std::string reason;
  // Reason-specific context, e.g. the id of the kept duplicate.
  std::string detail;

  friend bool operator==(const DropRecord&, const DropRecord&) = default;
};

struct StageReport {
  std::string stage;
  bool enabled = true;
  std::uint64_t docs_in = 0;
  std::uint64_t docs_out = 0;
  std::uint64_t tokens_in = 0;
  std::uint64_t tokens_out = 0;
  std::map<std::string, std::uint64_t> drop_reasons;
  // Non-drop statistics, e.g. PII replacements per rule.
  std::map<std::string, std::uint64_t> counters;
  std::vector<DropRecord> dropped;
  // Sub-reports for composite stages (dedup_pass).
  std::vector<StageReport> phases;
  std::int64_t duration_ms = 0;

  static StageReport start(std::string stage, const Corpus& input);
  void drop(const Document& doc, std::string reason, std::string detail = {});
  void finish(const Corpus& output);

  std::uint64_t dropped_docs() const;

  friend bool operator==(const StageReport&, const StageReport&) = default;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct StageResult {
  Corpus corpus;
  StageReport report;
};

struct SourceTokens {
  std::string source;
  std::uint64_t original_tokens = 0;
  std::uint64_t final_tokens = 0;

  std::int64_t reduction() const {
    return static_cast<std::int64_t>(original_tokens) - static_cast<std::int64_t>(final_tokens);
  }
  // (original - final) / original * 100; 0 when original is 0.
  double percentage_reduction() const;

  friend bool operator==(const SourceTokens&, const SourceTokens&) = default;
};

struct PipelineReport {
  std::vector<SourceTokens> sources;
  std::vector<StageReport> stages;

  std::uint64_t original_tokens() const;
  std::uint64_t final_tokens() const;
  SourceTokens total() const;

  friend bool operator==(const PipelineReport&, const PipelineReport&) = default;
};

enum class ReportFormat { Json, Table };

ReportFormat parse_report_format(std::string_view name);

// Percentages are shown with one significant decimal padded to two places
// (32.2086 -> "32.20"), the convention of the published token-reduction
// tables. JSON output also carries the unrounded value.
std::string format_percentage(double percent);
// 798260573 -> "798,260,573"
std::string format_thousands(std::int64_t value);

std::string render_report(const PipelineReport& report, ReportFormat format);
std::string render_stage_report(const StageReport& report);
PipelineReport parse_report(std::string_view json_text);

}  // namespace forge
