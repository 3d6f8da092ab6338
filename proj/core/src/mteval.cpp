#include "forge/mteval.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "forge/error.hpp"
#include "forge/unicode.hpp"

namespace forge {

using ordered_json = nlohmann::ordered_json;

Smoothing parse_smoothing(std::string_view name) {
  if (name == "none") return Smoothing::None;
  if (name == "epsilon") return Smoothing::Epsilon;
  throw ConfigError("unknown smoothing \"" + std::string(name) + "\" (expected none|epsilon)");
}

namespace {

using Ngram = std::vector<std::string_view>;

std::map<Ngram, std::size_t> count_ngrams(const std::vector<std::string_view>& tokens, std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                 tokens.begin() + static_cast<std::ptrdiff_t>(i + n))] += 1;
  }
  return counts;
}

}  // namespace

BleuResult corpus_bleu(std::span<const std::string> hypotheses, std::span<const std::string> references,
                       Smoothing smoothing) {
  if (hypotheses.empty() || references.empty()) throw DataError("BLEU needs at least one segment");
  if (hypotheses.size() != references.size()) {
    throw DataError(fmt::format("BLEU: {} hypotheses but {} references", hypotheses.size(), references.size()));
  }

  BleuResult result;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto hyp = unicode::split_whitespace(hypotheses[s]);
    const auto ref = unicode::split_whitespace(references[s]);
    result.hyp_length += hyp.size();
    result.ref_length += ref.size();
    for (std::size_t n = 1; n <= kBleuMaxOrder; ++n) {
      if (hyp.size() < n) continue;
      result.totals[n - 1] += hyp.size() - n + 1;
      const auto hyp_counts = count_ngrams(hyp, n);
      const auto ref_counts = count_ngrams(ref, n);
      for (const auto& [gram, count] : hyp_counts) {
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) result.matches[n - 1] += std::min(count, it->second);
      }
    }
  }

  const auto c = static_cast<double>(result.hyp_length);
  const auto r = static_cast<double>(result.ref_length);
  if (result.hyp_length == 0) {
    result.brevity_penalty = 0.0;
  } else if (result.hyp_length < result.ref_length) {
    result.brevity_penalty = std::exp(1.0 - r / c);
  } else {
    result.brevity_penalty = 1.0;
  }

  bool any_zero = false;
  double log_sum = 0.0;
  for (std::size_t k = 0; k < kBleuMaxOrder; ++k) {
    double p = 0.0;
    if (result.totals[k] > 0) {
      p = static_cast<double>(result.matches[k]) / static_cast<double>(result.totals[k]);
      if (result.matches[k] == 0 && smoothing == Smoothing::Epsilon) {
        p = 1.0 / (2.0 * static_cast<double>(result.totals[k]));
      }
    }
    result.precisions[k] = p;
    if (p == 0.0) {
      any_zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  result.score = any_zero ? 0.0
                          : 100.0 * result.brevity_penalty *
                                std::exp(log_sum / static_cast<double>(kBleuMaxOrder));
  return result;
}

void EvalSet::validate() const {
  if (!sources.empty() && sources.size() != references.size()) {
    throw DataError(fmt::format("eval set {}: {} sources but {} references", name, sources.size(),
                                references.size()));
  }
  for (const auto& sys : systems) {
    if (sys.hypotheses.size() != references.size()) {
      throw DataError(fmt::format("eval set {}: system {} has {} hypotheses but {} references", name,
                                  sys.system, sys.hypotheses.size(), references.size()));
    }
  }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (lines.empty() && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

EvalSet load_eval_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read eval manifest " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  EvalSet set;
  try {
    const auto j = ordered_json::parse(buffer.str());
    for (const auto& [key, value] : j.items()) {
      if (key != "name" && key != "refs_path" && key != "sources_path" && key != "systems") {
        throw ConfigError(path.string() + ": unknown manifest key \"" + key + "\"");
      }
    }
    set.name = j.at("name").get<std::string>();
    set.references = read_lines(resolve(j.at("refs_path").get<std::string>()));
    if (j.contains("sources_path")) set.sources = read_lines(resolve(j["sources_path"].get<std::string>()));
    for (const auto& [system, hyp_path] : j.at("systems").items()) {
      set.systems.push_back(SystemOutputs{system, read_lines(resolve(hyp_path.get<std::string>()))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": malformed eval manifest: " + e.what());
  }
  set.validate();
  return set;
}

SystemComparison compare_systems(std::span<const EvalSet> sets, Smoothing smoothing) {
  SystemComparison cmp;
  for (const auto& set : sets) {
    if (set.systems.empty()) throw DataError("eval set " + set.name + " has no systems");
    set.validate();
    cmp.sets.push_back(set.name);
    for (const auto& sys : set.systems) {
      if (std::find(cmp.systems.begin(), cmp.systems.end(), sys.system) == cmp.systems.end()) {
        cmp.systems.push_back(sys.system);
      }
    }
  }
  cmp.cells.assign(cmp.systems.size(), std::vector<std::optional<BleuResult>>(sets.size()));
  cmp.best.assign(sets.size(), std::nullopt);
  for (std::size_t col = 0; col < sets.size(); ++col) {
    for (const auto& sys : sets[col].systems) {
      const auto row = static_cast<std::size_t>(
          std::find(cmp.systems.begin(), cmp.systems.end(), sys.system) - cmp.systems.begin());
      try {
        cmp.cells[row][col] = corpus_bleu(sys.hypotheses, sets[col].references, smoothing);
      } catch (const DataError& e) {
        throw DataError("eval set " + sets[col].name + ", system " + sys.system + ": " + e.what());
      }
    }
    for (std::size_t row = 0; row < cmp.systems.size(); ++row) {
      const auto& cell = cmp.cells[row][col];
      if (!cell) continue;
      if (!cmp.best[col] || cell->score > cmp.cells[*cmp.best[col]][col]->score) cmp.best[col] = row;
    }
  }
  return cmp;
}

namespace {

double round2(double x) { return std::round(x * 100.0) / 100.0; }

}  // namespace

std::string render_comparison(const SystemComparison& cmp, ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json j;
    j["sets"] = cmp.sets;
    j["systems"] = ordered_json::array();
    for (std::size_t row = 0; row < cmp.systems.size(); ++row) {
      ordered_json entry;
      entry["system"] = cmp.systems[row];
      entry["scores"] = ordered_json::object();
      for (std::size_t col = 0; col < cmp.sets.size(); ++col) {
        const auto& cell = cmp.cells[row][col];
        entry["scores"][cmp.sets[col]] = cell ? ordered_json(round2(cell->score)) : ordered_json(nullptr);
      }
      j["systems"].push_back(std::move(entry));
    }
    j["best"] = ordered_json::object();
    for (std::size_t col = 0; col < cmp.sets.size(); ++col) {
      j["best"][cmp.sets[col]] = cmp.best[col] ? ordered_json(cmp.systems[*cmp.best[col]]) : ordered_json(nullptr);
    }
    return j.dump(2) + "\n";
  }

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Model"});
  for (const auto& s : cmp.sets) rows[0].push_back(s);
  for (std::size_t row = 0; row < cmp.systems.size(); ++row) {
    std::vector<std::string> line{cmp.systems[row]};
    for (std::size_t col = 0; col < cmp.sets.size(); ++col) {
      const auto& cell = cmp.cells[row][col];
      if (!cell) {
        line.push_back("-");
        continue;
      }
      const bool best = cmp.best[col] == row;
      line.push_back(fmt::format("{:.2f}{}", cell->score, best ? "*" : " "));
    }
    rows.push_back(std::move(line));
  }
  std::vector<std::size_t> widths(rows[0].size(), 0);
  for (const auto& line : rows) {
    for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], line[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string text;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c > 0) text += " | ";
      text += (c == 0 || r == 0) ? fmt::format("{:<{}}", rows[r][c], widths[c])
                                 : fmt::format("{:>{}}", rows[r][c], widths[c]);
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out += text + "\n";
    if (r == 0) {
      std::string rule;
      for (std::size_t c = 0; c < widths.size(); ++c) {
        if (c > 0) rule += "-+-";
        rule += std::string(widths[c], '-');
      }
      out += rule + "\n";
    }
  }
  out += "* best score per column\n";
  return out;
}

}  // namespace forge
