#include "forge/normalize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "forge/error.hpp"
#include "forge/io.hpp"
#include "forge/unicode.hpp"

namespace forge {

namespace embedded {
extern const std::string_view charmap_ur_json;
}

namespace {

constexpr char32_t kZwnj = 0x200C;

std::string describe(std::u32string_view seq) {
  std::string out;
  for (char32_t cp : seq) {
    if (!out.empty()) out += ' ';
    out += unicode::format_codepoint(cp);
  }
  return out.empty() ? "\"\"" : out;
}

std::u32string parse_sequence(const std::string& text) {
  std::u32string seq;
  for (std::string_view part : unicode::split_whitespace(text)) {
    const auto cp = unicode::parse_codepoint(part);
    if (!cp) throw ConfigError("bad codepoint \"" + std::string(part) + "\" in character table");
    seq.push_back(*cp);
  }
  return seq;
}

void parse_strip_entry(const std::string& entry, std::set<char32_t>& out) {
  const auto dots = entry.find("..");
  if (dots == std::string::npos) {
    const auto cp = unicode::parse_codepoint(entry);
    if (!cp) throw ConfigError("bad codepoint \"" + entry + "\" in strip list");
    out.insert(*cp);
    return;
  }
  const auto lo = unicode::parse_codepoint(std::string_view(entry).substr(0, dots));
  const auto hi = unicode::parse_codepoint(std::string_view(entry).substr(dots + 2));
  if (!lo || !hi || *lo > *hi) throw ConfigError("bad codepoint range \"" + entry + "\" in strip list");
  for (char32_t cp = *lo; cp <= *hi; ++cp) out.insert(cp);
}

}  // namespace

CharMapTable::CharMapTable(std::vector<CharMapRule> rules, std::set<char32_t> strip,
                           bool strip_isolated_zwnj, std::size_t collapse_punct_run)
    : rules_(std::move(rules)),
      strip_(std::move(strip)),
      strip_isolated_zwnj_(strip_isolated_zwnj),
      collapse_punct_run_(collapse_punct_run) {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& rule = rules_[i];
    if (rule.from.empty()) throw ConfigError("character table rule with empty input");
    if (rule.from == rule.to) {
      throw ConfigError("character table rule maps " + describe(rule.from) + " to itself");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (rules_[j].from == rule.from) {
        throw ConfigError("character table has two rules for " + describe(rule.from));
      }
    }
    for (char32_t cp : rule.to) {
      if (strip_.contains(cp)) {
        throw ConfigError("character table rule output " + describe(rule.to) +
                          " contains stripped codepoint " + unicode::format_codepoint(cp));
      }
    }
  }
  for (const auto& producer : rules_) {
    for (const auto& consumer : rules_) {
      if (producer.to.find(consumer.from) != std::u32string::npos) {
        throw ConfigError("character table is not closed: output " + describe(producer.to) +
                          " contains input " + describe(consumer.from));
      }
    }
  }

  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const char32_t first = rules_[i].from.front();
    auto it = std::lower_bound(by_first_.begin(), by_first_.end(), first,
                               [](const auto& bucket, char32_t cp) { return bucket.first < cp; });
    if (it == by_first_.end() || it->first != first) it = by_first_.insert(it, {first, {}});
    it->second.push_back(i);
    longest_ = std::max(longest_, rules_[i].from.size());
  }
  for (auto& [first, indices] : by_first_) {
    std::stable_sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
      return rules_[a].from.size() > rules_[b].from.size();
    });
  }
}

std::size_t CharMapTable::match(std::u32string_view text, std::size_t pos) const {
  const char32_t first = text[pos];
  const auto it = std::lower_bound(by_first_.begin(), by_first_.end(), first,
                                   [](const auto& bucket, char32_t cp) { return bucket.first < cp; });
  if (it == by_first_.end() || it->first != first) return npos;
  for (std::size_t index : it->second) {
    const auto& from = rules_[index].from;
    if (text.substr(pos, from.size()) == from) return index;
  }
  return npos;
}

CharMapTable CharMapTable::from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("character table is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("character table must be a JSON object");
  std::vector<CharMapRule> rules;
  std::set<char32_t> strip;
  bool zwnj = true;
  std::size_t collapse = 3;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "map") {
        for (const auto& pair : value) {
          if (!pair.is_array() || pair.size() != 2) {
            throw ConfigError("character table \"map\" entries must be [from, to] pairs");
          }
          rules.push_back(CharMapRule{parse_sequence(pair[0].get<std::string>()),
                                      parse_sequence(pair[1].get<std::string>())});
        }
      } else if (key == "strip") {
        for (const auto& entry : value) parse_strip_entry(entry.get<std::string>(), strip);
      } else if (key == "strip_isolated_zwnj") {
        zwnj = value.get<bool>();
      } else if (key == "collapse_punct_run") {
        collapse = value.get<std::size_t>();
      } else {
        throw ConfigError("unknown character table key \"" + key + "\"");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed character table: ") + e.what());
  }
  return CharMapTable(std::move(rules), std::move(strip), zwnj, collapse);
}

CharMapTable CharMapTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read character table " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return from_json(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

const CharMapTable& CharMapTable::urdu_default() {
  static const CharMapTable table = from_json(embedded::charmap_ur_json);
  return table;
}

std::string standardize(std::string_view text, const CharMapTable& table) {
  std::u32string cps = unicode::decode(text);

  if (!table.strip_set().empty()) {
    std::erase_if(cps, [&](char32_t cp) { return table.strip_set().contains(cp); });
  }

  if (!table.rules().empty()) {
    std::u32string mapped;
    mapped.reserve(cps.size());
    for (std::size_t pos = 0; pos < cps.size();) {
      const std::size_t rule = table.match(cps, pos);
      if (rule == CharMapTable::npos) {
        mapped.push_back(cps[pos++]);
      } else {
        mapped += table.rules()[rule].to;
        pos += table.rules()[rule].from.size();
      }
    }
    cps = std::move(mapped);
  }

  if (table.strip_isolated_zwnj()) {
    // A run of ZWNJs joins nothing when it touches whitespace or an edge;
    // between two other characters it is kept as a single ZWNJ.
    std::u32string out;
    out.reserve(cps.size());
    for (std::size_t pos = 0; pos < cps.size();) {
      if (cps[pos] != kZwnj) {
        out.push_back(cps[pos++]);
        continue;
      }
      std::size_t end = pos;
      while (end < cps.size() && cps[end] == kZwnj) ++end;
      const bool left_ok = pos > 0 && !unicode::is_whitespace(cps[pos - 1]);
      const bool right_ok = end < cps.size() && !unicode::is_whitespace(cps[end]);
      if (left_ok && right_ok) out.push_back(kZwnj);
      pos = end;
    }
    cps = std::move(out);
  }

  if (const std::size_t min_run = table.collapse_punct_run(); min_run >= 2) {
    std::u32string out;
    out.reserve(cps.size());
    for (std::size_t pos = 0; pos < cps.size();) {
      std::size_t end = pos + 1;
      while (end < cps.size() && cps[end] == cps[pos]) ++end;
      const std::size_t run = end - pos;
      if (run >= min_run && unicode::is_punct_or_symbol(cps[pos])) {
        out.push_back(cps[pos]);
      } else {
        out.append(cps, pos, run);
      }
      pos = end;
    }
    cps = std::move(out);
  }

  return unicode::encode(cps);
}

StageResult standardize_corpus(const Corpus& corpus, const CharMapTable& table,
                               const ExecutionOptions& exec, const TokenCounter& counter) {
  StageResult result{Corpus{}, StageReport::start("standardize", corpus)};
  const Stopwatch clock;
  auto docs = parallel_map(std::span(corpus.documents()), exec.workers, [&](const Document& d) {
    return d.with_text(standardize(d.text, table), counter);
  });
  std::uint64_t changed = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].text != corpus[i].text) ++changed;
    result.corpus.push_back(std::move(docs[i]));
  }
  result.report.counters["docs_changed"] = changed;
  result.report.finish(result.corpus);
  result.report.duration_ms = clock.elapsed_ms();
  return result;
}

// ---------------------------------------------------------------------------
// Context-length splitting

void SplitConfig::validate() const {
  if (target_tokens < 1) throw ConfigError("split target_tokens must be >= 1");
  if (boundary_preference.empty()) throw ConfigError("split boundary_preference is empty");
}

Boundary parse_boundary(std::string_view name) {
  if (name == "paragraph") return Boundary::Paragraph;
  if (name == "sentence") return Boundary::Sentence;
  if (name == "whitespace") return Boundary::Whitespace;
  throw ConfigError("unknown split boundary \"" + std::string(name) +
                    "\" (expected paragraph|sentence|whitespace)");
}

namespace {

char32_t last_codepoint(std::string_view token) {
  std::size_t start = token.size();
  while (start > 0) {
    --start;
    if ((static_cast<unsigned char>(token[start]) & 0xC0) != 0x80) break;
  }
  std::size_t pos = start;
  return unicode::detail::next(token, pos);
}

}  // namespace

std::vector<Document> split_document(const Document& doc, const SplitConfig& cfg,
                                     const TokenCounter& counter) {
  cfg.validate();
  const std::string_view text = doc.text;
  const auto tokens = unicode::split_whitespace(text);
  const std::size_t n = tokens.size();
  const std::size_t target = cfg.target_tokens;
  const std::size_t lo = (target + 1) / 2;
  const std::size_t hi = target + target / 2;
  if (n <= hi) return {doc};

  constexpr std::size_t kUnranked = 3;
  auto rank_of = [&](Boundary b) {
    const auto it = std::find(cfg.boundary_preference.begin(), cfg.boundary_preference.end(), b);
    return it == cfg.boundary_preference.end()
               ? kUnranked
               : static_cast<std::size_t>(it - cfg.boundary_preference.begin());
  };
  // gap_rank[i]: rank of the cut after token i.
  std::vector<std::size_t> gap_rank(n - 1, kUnranked);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t gap_begin = static_cast<std::size_t>(tokens[i].data() - text.data()) + tokens[i].size();
    const std::size_t gap_end = static_cast<std::size_t>(tokens[i + 1].data() - text.data());
    const std::string_view gap = text.substr(gap_begin, gap_end - gap_begin);
    std::size_t rank = rank_of(Boundary::Whitespace);
    if (cfg.sentence_end.find(last_codepoint(tokens[i])) != std::u32string::npos) {
      rank = std::min(rank, rank_of(Boundary::Sentence));
    }
    if (std::count(gap.begin(), gap.end(), '\n') >= 2) rank = std::min(rank, rank_of(Boundary::Paragraph));
    gap_rank[i] = rank;
  }

  std::vector<std::pair<std::size_t, std::size_t>> spans;  // [first, last) token indices
  std::size_t start = 0;
  while (n - start > hi) {
    const std::size_t remaining = n - start;
    const std::size_t max_len_keep_tail = remaining - lo;
    const bool tail_ok = max_len_keep_tail >= lo;
    std::size_t best_len = 0;
    auto best_key = std::make_tuple(kUnranked + 1, std::size_t{0}, std::size_t{0});
    for (std::size_t len = lo; len <= hi; ++len) {
      if (tail_ok && len > max_len_keep_tail) break;
      const std::size_t distance = len > target ? len - target : target - len;
      const auto key = std::make_tuple(gap_rank[start + len - 1], distance, len);
      if (best_len == 0 || key < best_key) {
        best_key = key;
        best_len = len;
      }
    }
    spans.emplace_back(start, start + best_len);
    start += best_len;
  }
  spans.emplace_back(start, n);

  std::vector<Document> chunks;
  chunks.reserve(spans.size());
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto [first, last] = spans[k];
    const std::size_t begin = static_cast<std::size_t>(tokens[first].data() - text.data());
    const std::size_t end =
        static_cast<std::size_t>(tokens[last - 1].data() - text.data()) + tokens[last - 1].size();
    chunks.push_back(Document::make(doc.id + "#" + std::to_string(k), doc.source,
                                    std::string(text.substr(begin, end - begin)), doc.meta, counter));
  }
  return chunks;
}

StageResult split_corpus(const Corpus& corpus, const SplitConfig& cfg, const ExecutionOptions& exec,
                         const TokenCounter& counter) {
  cfg.validate();
  StageResult result{Corpus{}, StageReport::start("split", corpus)};
  const Stopwatch clock;
  auto pieces = parallel_map(std::span(corpus.documents()), exec.workers,
                             [&](const Document& d) { return split_document(d, cfg, counter); });
  std::uint64_t split_docs = 0;
  for (auto& chunks : pieces) {
    if (chunks.size() > 1) ++split_docs;
    for (auto& chunk : chunks) result.corpus.push_back(std::move(chunk));
  }
  result.report.counters["docs_split"] = split_docs;
  result.report.counters["chunks"] = result.corpus.size();
  result.report.finish(result.corpus);
  result.report.duration_ms = clock.elapsed_ms();
  return result;
}

}  // namespace forge
