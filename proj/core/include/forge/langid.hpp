#pragma once

#include <vector>

#include "forge/document.hpp"
#include "forge/parallel.hpp"
#include "forge/report.hpp"

namespace forge {

struct CodepointRange {
  char32_t lo = 0;
  char32_t hi = 0;

  bool contains(char32_t cp) const { return lo <= cp && cp <= hi; }
  friend bool operator==(const CodepointRange&, const CodepointRange&) = default;
};

// Arabic, Arabic Supplement and both presentation-form blocks.
std::vector<CodepointRange> default_urdu_ranges();

struct LangFilterConfig {
  double threshold = 0.9;
  std::vector<CodepointRange> script_ranges = default_urdu_ranges();

  // Throws ConfigError. Ranges must be lo <= hi and non-overlapping.
  void validate() const;
};

class LanguageScore {
 public:
  LanguageScore() = default;
  explicit LanguageScore(double value);
  double value() const { return value_; }

 private:
  double value_ = 0.0;
};

// Fraction of classifiable whitespace tokens written in the target script.
// A token is classifiable when it has at least one letter, mark or digit; it
// counts as target when a strict majority of those codepoints fall in
// script_ranges. Tokens made only of punctuation/symbols are ignored.
LanguageScore score_language(std::string_view text, const LangFilterConfig& cfg);

// Keeps documents scoring >= threshold. Drops are recorded as
// "lang_below_threshold" with the score as detail.
StageResult filter_language(const Corpus& corpus, const LangFilterConfig& cfg,
                            const ExecutionOptions& exec = {});

}  // namespace forge
