#include "forge/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "forge/error.hpp"

namespace forge {

using ordered_json = nlohmann::ordered_json;

StageReport StageReport::start(std::string stage, const Corpus& input) {
  StageReport report;
  report.stage = std::move(stage);
  report.docs_in = input.size();
  report.tokens_in = input.total_tokens();
  return report;
}

void StageReport::drop(const Document& doc, std::string reason, std::string detail) {
  drop_reasons[reason] += 1;
  dropped.push_back(DropRecord{doc.id, std::move(reason), std::move(detail)});
}

void StageReport::finish(const Corpus& output) {
  docs_out = output.size();
  tokens_out = output.total_tokens();
}

std::uint64_t StageReport::dropped_docs() const {
  std::uint64_t total = 0;
  for (const auto& [reason, count] : drop_reasons) total += count;
  return total;
}

double SourceTokens::percentage_reduction() const {
  if (original_tokens == 0) return 0.0;
  return static_cast<double>(reduction()) / static_cast<double>(original_tokens) * 100.0;
}

std::uint64_t PipelineReport::original_tokens() const {
  std::uint64_t total = 0;
  for (const auto& s : sources) total += s.original_tokens;
  return total;
}

std::uint64_t PipelineReport::final_tokens() const {
  std::uint64_t total = 0;
  for (const auto& s : sources) total += s.final_tokens;
  return total;
}

SourceTokens PipelineReport::total() const {
  return SourceTokens{"Total", original_tokens(), final_tokens()};
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "table") return ReportFormat::Table;
  throw ConfigError("unknown report format \"" + std::string(name) + "\" (expected json|table)");
}

std::string format_percentage(double percent) {
  const double tenths = std::round(percent * 10.0) / 10.0;
  // Avoid printing "-0.00".
  return fmt::format("{:.2f}", tenths == 0.0 ? 0.0 : tenths);
}

std::string format_thousands(std::int64_t value) {
  std::string digits = std::to_string(value < 0 ? -value : value);
  std::string out;
  const std::size_t lead = digits.size() % 3 == 0 ? 3 : digits.size() % 3;
  out.append(digits, 0, lead);
  for (std::size_t i = lead; i < digits.size(); i += 3) {
    out.push_back(',');
    out.append(digits, i, 3);
  }
  return value < 0 ? "-" + out : out;
}

namespace {

ordered_json to_json(const StageReport& r) {
  ordered_json j;
  j["stage"] = r.stage;
  j["enabled"] = r.enabled;
  j["docs_in"] = r.docs_in;
  j["docs_out"] = r.docs_out;
  j["tokens_in"] = r.tokens_in;
  j["tokens_out"] = r.tokens_out;
  j["drop_reasons"] = ordered_json::object();
  for (const auto& [k, v] : r.drop_reasons) j["drop_reasons"][k] = v;
  j["counters"] = ordered_json::object();
  for (const auto& [k, v] : r.counters) j["counters"][k] = v;
  j["dropped"] = ordered_json::array();
  for (const auto& d : r.dropped) {
    ordered_json rec;
    rec["id"] = d.id;
    rec["reason"] = d.reason;
    rec["detail"] = d.detail;
    j["dropped"].push_back(std::move(rec));
  }
  j["phases"] = ordered_json::array();
  for (const auto& p : r.phases) j["phases"].push_back(to_json(p));
  j["duration_ms"] = r.duration_ms;
  return j;
}

ordered_json to_json(const SourceTokens& s) {
  ordered_json j;
  j["source"] = s.source;
  j["original_tokens"] = s.original_tokens;
  j["final_tokens"] = s.final_tokens;
  j["reduction"] = s.reduction();
  j["percentage_reduction"] = s.percentage_reduction();
  j["percentage_reduction_display"] = format_percentage(s.percentage_reduction());
  return j;
}

template <class Map>
void read_counts(const ordered_json& j, const char* key, Map& out) {
  if (!j.contains(key)) return;
  for (const auto& [k, v] : j.at(key).items()) out[k] = v.template get<std::uint64_t>();
}

StageReport stage_from_json(const ordered_json& j) {
  StageReport r;
  r.stage = j.at("stage").get<std::string>();
  r.enabled = j.value("enabled", true);
  r.docs_in = j.at("docs_in").get<std::uint64_t>();
  r.docs_out = j.at("docs_out").get<std::uint64_t>();
  r.tokens_in = j.at("tokens_in").get<std::uint64_t>();
  r.tokens_out = j.at("tokens_out").get<std::uint64_t>();
  read_counts(j, "drop_reasons", r.drop_reasons);
  read_counts(j, "counters", r.counters);
  if (j.contains("dropped")) {
    for (const auto& d : j.at("dropped")) {
      r.dropped.push_back(DropRecord{d.at("id").get<std::string>(), d.at("reason").get<std::string>(),
                                     d.value("detail", std::string{})});
    }
  }
  if (j.contains("phases")) {
    for (const auto& p : j.at("phases")) r.phases.push_back(stage_from_json(p));
  }
  r.duration_ms = j.value("duration_ms", std::int64_t{0});
  return r;
}

struct Column {
  std::string header;
  bool right_align;
};

std::string render_grid(const std::vector<Column>& columns,
                        const std::vector<std::vector<std::string>>& rows,
                        std::size_t total_row_index) {
  std::vector<std::size_t> widths(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    widths[c] = columns[c].header.size();
    for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells, bool header) {
    std::string out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out += " | ";
      const bool right = !header && columns[c].right_align;
      out += right ? fmt::format("{:>{}}", cells[c], widths[c])
                   : fmt::format("{:<{}}", cells[c], widths[c]);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string rule;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c > 0) rule += "-+-";
    rule += std::string(widths[c], '-');
  }
  rule += "\n";

  std::vector<std::string> headers;
  for (const auto& col : columns) headers.push_back(col.header);
  std::string out = line(headers, true) + rule;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == total_row_index) out += rule;
    out += line(rows[i], false);
  }
  return out;
}

std::vector<std::string> source_row(const SourceTokens& s) {
  return {s.source, format_thousands(static_cast<std::int64_t>(s.original_tokens)),
          format_thousands(static_cast<std::int64_t>(s.final_tokens)),
          format_thousands(s.reduction()), format_percentage(s.percentage_reduction())};
}

std::string render_table(const PipelineReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : report.sources) rows.push_back(source_row(s));
  rows.push_back(source_row(report.total()));
  std::string out = render_grid({{"Source", false},
                                 {"Original Token Count", true},
                                 {"Token Count After Processing", true},
                                 {"Reduction", true},
                                 {"Percentage Reduction (%)", true}},
                                rows, rows.size() - 1);
  if (report.stages.empty()) return out;

  std::vector<std::vector<std::string>> stage_rows;
  for (const auto& st : report.stages) {
    std::string reasons;
    for (const auto& [reason, count] : st.drop_reasons) {
      if (!reasons.empty()) reasons += ", ";
      reasons += fmt::format("{}={}", reason, count);
    }
    stage_rows.push_back({st.enabled ? st.stage : st.stage + " (off)",
                          format_thousands(static_cast<std::int64_t>(st.docs_in)),
                          format_thousands(static_cast<std::int64_t>(st.docs_out)),
                          format_thousands(static_cast<std::int64_t>(st.tokens_in)),
                          format_thousands(static_cast<std::int64_t>(st.tokens_out)), reasons});
  }
  out += "\n";
  out += render_grid({{"Stage", false},
                      {"Docs In", true},
                      {"Docs Out", true},
                      {"Tokens In", true},
                      {"Tokens Out", true},
                      {"Drops", false}},
                     stage_rows, stage_rows.size());
  return out;
}

}  // namespace

std::string render_stage_report(const StageReport& report) { return to_json(report).dump(2) + "\n"; }

std::string render_report(const PipelineReport& report, ReportFormat format) {
  if (format == ReportFormat::Table) return render_table(report);
  ordered_json j;
  j["format_version"] = 1;
  j["sources"] = ordered_json::array();
  for (const auto& s : report.sources) j["sources"].push_back(to_json(s));
  j["total"] = to_json(report.total());
  j["stages"] = ordered_json::array();
  for (const auto& st : report.stages) j["stages"].push_back(to_json(st));
  return j.dump(2) + "\n";
}

PipelineReport parse_report(std::string_view json_text) {
  try {
    const auto j = ordered_json::parse(json_text);
    PipelineReport report;
    for (const auto& s : j.at("sources")) {
      report.sources.push_back(SourceTokens{s.at("source").get<std::string>(),
                                            s.at("original_tokens").get<std::uint64_t>(),
                                            s.at("final_tokens").get<std::uint64_t>()});
    }
    if (j.contains("stages")) {
      for (const auto& st : j.at("stages")) report.stages.push_back(stage_from_json(st));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid pipeline report: ") + e.what());
  }
}

}  // namespace forge
