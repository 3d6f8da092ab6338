#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "forge/document.hpp"
#include "forge/normalize.hpp"
#include "forge/parallel.hpp"
#include "forge/report.hpp"

namespace forge {

using WordList = std::unordered_set<std::string>;

// Lookup key for list matching: punctuation trimmed from both ends, ASCII
// lowercased. Tokens that are pure punctuation yield "".
std::string word_key(std::string_view token);

// One word per line, UTF-8. Words are standardized with `table`, then keyed
// with word_key. Blank lines are ignored.
WordList parse_word_list(std::string_view content, const CharMapTable& table);
WordList load_word_list(const std::filesystem::path& path, const CharMapTable& table);
// The bundled Urdu function-word list.
const WordList& urdu_stopwords();

struct QualityConfig {
  double stopword_threshold = 0.1;
  double flagged_threshold = 0.025;
  WordList stopword_list = urdu_stopwords();
  WordList flagged_list;
  std::size_t min_tokens = 1;

  void validate() const;
};

// Share of whitespace tokens whose word_key is in the list; 0 for empty text.
double list_ratio(std::string_view text, const WordList& words);
double stopword_ratio(const Document& doc, const QualityConfig& cfg);
double flagged_ratio(const Document& doc, const QualityConfig& cfg);

// Drops, checking in this order: token_count < min_tokens ("empty"),
// stopword ratio below threshold ("stopword_low"), flagged ratio above
// threshold ("flagged_high"). Ratios equal to a threshold are kept.
StageResult filter_quality(const Corpus& corpus, const QualityConfig& cfg,
                           const ExecutionOptions& exec = {});

struct PiiRule {
  std::string name;
  std::string pattern;
  std::string replacement;
};

// Ordered regex rules (ECMAScript syntax, matched over UTF-8 bytes).
class PiiRuleSet {
 public:
  PiiRuleSet() = default;
  // Throws ConfigError if a pattern fails to compile, a replacement is not of
  // the form <PII:NAME>, or a replacement token would itself be matched.
  explicit PiiRuleSet(std::vector<PiiRule> rules);

  // JSON array of {"name", "pattern", "replacement"}.
  static PiiRuleSet from_json(std::string_view json_text);
  static PiiRuleSet load(const std::filesystem::path& path);
  // EMAIL, ID (CNIC), PHONE.
  static const PiiRuleSet& defaults();

  const std::vector<PiiRule>& rules() const { return rules_; }
  const std::vector<std::regex>& compiled() const { return compiled_; }
  bool empty() const { return rules_.empty(); }

 private:
  std::vector<PiiRule> rules_;
  std::vector<std::regex> compiled_;
};

struct ScrubResult {
  std::string text;
  // Per rule name; rules with no match are absent.
  std::map<std::string, std::uint64_t> replacements;
};

// Applies each rule in order, replacing non-overlapping leftmost matches.
ScrubResult scrub_pii(std::string_view text, const PiiRuleSet& rules);

// Counters in the report hold per-rule replacement totals.
StageResult scrub_corpus(const Corpus& corpus, const PiiRuleSet& rules,
                         const ExecutionOptions& exec = {},
                         const TokenCounter& counter = count_tokens);

}  // namespace forge
