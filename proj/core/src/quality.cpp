#include "forge/quality.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "forge/error.hpp"
#include "forge/unicode.hpp"

namespace forge {

namespace embedded {
extern const std::string_view stopwords_ur_txt;
extern const std::string_view pii_rules_json;
}  // namespace embedded

std::string word_key(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  // Trim leading punctuation.
  while (begin < end) {
    std::size_t pos = begin;
    if (!unicode::is_punct_or_symbol(unicode::detail::next(token, pos))) break;
    begin = pos;
  }
  // Trim trailing punctuation, one codepoint at a time from the back.
  while (end > begin) {
    std::size_t start = end;
    do {
      --start;
    } while (start > begin && (static_cast<unsigned char>(token[start]) & 0xC0) == 0x80);
    std::size_t pos = start;
    if (!unicode::is_punct_or_symbol(unicode::detail::next(token, pos))) break;
    end = start;
  }
  std::string key(token.substr(begin, end - begin));
  for (char& c : key) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return key;
}

WordList parse_word_list(std::string_view content, const CharMapTable& table) {
  WordList words;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const std::size_t nl = content.find('\n', pos);
    const std::string_view line =
        content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    const std::string_view word = unicode::trim(line);
    if (!word.empty()) {
      std::string key = word_key(standardize(word, table));
      if (!key.empty()) words.insert(std::move(key));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return words;
}

WordList load_word_list(const std::filesystem::path& path, const CharMapTable& table) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read word list " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();
  if (content.starts_with("\xEF\xBB\xBF")) content.erase(0, 3);
  return parse_word_list(content, table);
}

const WordList& urdu_stopwords() {
  static const WordList words = parse_word_list(embedded::stopwords_ur_txt, CharMapTable::urdu_default());
  return words;
}

void QualityConfig::validate() const {
  if (!(stopword_threshold >= 0.0 && stopword_threshold <= 1.0)) {
    throw ConfigError(fmt::format("stopword_threshold {} outside [0, 1]", stopword_threshold));
  }
  if (!(flagged_threshold >= 0.0 && flagged_threshold <= 1.0)) {
    throw ConfigError(fmt::format("flagged_threshold {} outside [0, 1]", flagged_threshold));
  }
}

double list_ratio(std::string_view text, const WordList& words) {
  const auto tokens = unicode::split_whitespace(text);
  if (tokens.empty()) return 0.0;
  std::size_t hits = 0;
  if (!words.empty()) {
    for (std::string_view token : tokens) {
      if (words.contains(word_key(token))) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

double stopword_ratio(const Document& doc, const QualityConfig& cfg) {
  return list_ratio(doc.text, cfg.stopword_list);
}

double flagged_ratio(const Document& doc, const QualityConfig& cfg) {
  return list_ratio(doc.text, cfg.flagged_list);
}

StageResult filter_quality(const Corpus& corpus, const QualityConfig& cfg, const ExecutionOptions& exec) {
  cfg.validate();
  StageResult result{Corpus{}, StageReport::start("quality", corpus)};
  const Stopwatch clock;

  struct Verdict {
    const char* reason = nullptr;
    std::string detail;
  };
  const auto verdicts = parallel_map(std::span(corpus.documents()), exec.workers, [&](const Document& d) {
    if (d.token_count < cfg.min_tokens) return Verdict{"empty", fmt::format("{}", d.token_count)};
    const double stop = stopword_ratio(d, cfg);
    if (stop < cfg.stopword_threshold) return Verdict{"stopword_low", fmt::format("{:.4f}", stop)};
    const double flagged = flagged_ratio(d, cfg);
    if (flagged > cfg.flagged_threshold) return Verdict{"flagged_high", fmt::format("{:.4f}", flagged)};
    return Verdict{};
  });
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (verdicts[i].reason == nullptr) {
      result.corpus.push_back(corpus[i]);
    } else {
      result.report.drop(corpus[i], verdicts[i].reason, verdicts[i].detail);
    }
  }
  result.report.finish(result.corpus);
  result.report.duration_ms = clock.elapsed_ms();
  return result;
}

// ---------------------------------------------------------------------------
// PII

namespace {

bool is_placeholder(std::string_view s) {
  if (!s.starts_with("<PII:") || !s.ends_with(">") || s.size() <= 6) return false;
  for (char c : s.substr(5, s.size() - 6)) {
    if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_')) return false;
  }
  return true;
}

}  // namespace

PiiRuleSet::PiiRuleSet(std::vector<PiiRule> rules) : rules_(std::move(rules)) {
  compiled_.reserve(rules_.size());
  for (const auto& rule : rules_) {
    if (rule.name.empty()) throw ConfigError("PII rule with empty name");
    if (!is_placeholder(rule.replacement)) {
      throw ConfigError("PII rule " + rule.name + ": replacement \"" + rule.replacement +
                        "\" is not of the form <PII:NAME>");
    }
    try {
      compiled_.emplace_back(rule.pattern, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw ConfigError("PII rule " + rule.name + ": pattern does not compile: " + e.what());
    }
  }
  // Scrubbing must be idempotent, so no rule may match any placeholder.
  for (const auto& producer : rules_) {
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      if (std::regex_search(producer.replacement, compiled_[i])) {
        throw ConfigError("PII rule " + rules_[i].name + " matches placeholder " + producer.replacement);
      }
    }
  }
}

PiiRuleSet PiiRuleSet::from_json(std::string_view json_text) {
  std::vector<PiiRule> rules;
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (!j.is_array()) throw ConfigError("PII rules must be a JSON array");
    for (const auto& entry : j) {
      for (const auto& [key, value] : entry.items()) {
        if (key != "name" && key != "pattern" && key != "replacement") {
          throw ConfigError("unknown PII rule key \"" + key + "\"");
        }
      }
      rules.push_back(PiiRule{entry.at("name").get<std::string>(), entry.at("pattern").get<std::string>(),
                              entry.at("replacement").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed PII rules: ") + e.what());
  }
  return PiiRuleSet(std::move(rules));
}

PiiRuleSet PiiRuleSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read PII rules " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return from_json(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

const PiiRuleSet& PiiRuleSet::defaults() {
  static const PiiRuleSet rules = from_json(embedded::pii_rules_json);
  return rules;
}

ScrubResult scrub_pii(std::string_view text, const PiiRuleSet& rules) {
  ScrubResult result{std::string(text), {}};
  for (std::size_t r = 0; r < rules.rules().size(); ++r) {
    const auto& re = rules.compiled()[r];
    const std::string& input = result.text;
    auto it = std::sregex_iterator(input.begin(), input.end(), re);
    const auto end = std::sregex_iterator();
    if (it == end) continue;
    std::string out;
    out.reserve(input.size());
    std::size_t last = 0;
    std::uint64_t count = 0;
    for (; it != end; ++it) {
      const auto& m = *it;
      if (m.length(0) == 0) continue;
      const auto at = static_cast<std::size_t>(m.position(0));
      out.append(input, last, at - last);
      out += rules.rules()[r].replacement;
      last = at + static_cast<std::size_t>(m.length(0));
      ++count;
    }
    if (count == 0) continue;
    out.append(input, last, std::string::npos);
    result.text = std::move(out);
    result.replacements[rules.rules()[r].name] += count;
  }
  return result;
}

StageResult scrub_corpus(const Corpus& corpus, const PiiRuleSet& rules, const ExecutionOptions& exec,
                         const TokenCounter& counter) {
  StageResult result{Corpus{}, StageReport::start("pii", corpus)};
  const Stopwatch clock;
  auto scrubbed = parallel_map(std::span(corpus.documents()), exec.workers,
                               [&](const Document& d) { return scrub_pii(d.text, rules); });
  std::uint64_t touched = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto& s = scrubbed[i];
    if (s.replacements.empty()) {
      result.corpus.push_back(corpus[i]);
      continue;
    }
    ++touched;
    for (const auto& [name, count] : s.replacements) result.report.counters[name] += count;
    result.corpus.push_back(corpus[i].with_text(std::move(s.text), counter));
  }
  result.report.counters["docs_scrubbed"] = touched;
  result.report.finish(result.corpus);
  result.report.duration_ms = clock.elapsed_ms();
  return result;
}

}  // namespace forge
