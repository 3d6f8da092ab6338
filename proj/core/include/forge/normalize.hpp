#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "forge/document.hpp"
#include "forge/parallel.hpp"
#include "forge/report.hpp"

namespace forge {

struct CharMapRule {
  std::u32string from;
  std::u32string to;

  friend bool operator==(const CharMapRule&, const CharMapRule&) = default;
};

// Character canonicalization table. Loaded from JSON of the form
//   {"map": [["U+064A", "U+06CC"], ["U+0627 U+0653", "U+0622"]],
//    "strip": ["U+0000..U+0008", "U+200B"],
//    "strip_isolated_zwnj": true,
//    "collapse_punct_run": 3}
class CharMapTable {
 public:
  CharMapTable() = default;
  // Throws ConfigError if the table is not closed (a rule maps a sequence to
  // itself, an output contains any rule input, or an output contains a
  // stripped codepoint).
  CharMapTable(std::vector<CharMapRule> rules, std::set<char32_t> strip,
               bool strip_isolated_zwnj = true, std::size_t collapse_punct_run = 3);

  static CharMapTable from_json(std::string_view json_text);
  static CharMapTable load(const std::filesystem::path& path);
  // The bundled Urdu table.
  static const CharMapTable& urdu_default();

  const std::vector<CharMapRule>& rules() const { return rules_; }
  const std::set<char32_t>& strip_set() const { return strip_; }
  bool strip_isolated_zwnj() const { return strip_isolated_zwnj_; }
  std::size_t collapse_punct_run() const { return collapse_punct_run_; }
  std::size_t longest_rule() const { return longest_; }

  // Index of the longest rule matching at text[pos], or npos.
  std::size_t match(std::u32string_view text, std::size_t pos) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<CharMapRule> rules_;
  std::set<char32_t> strip_;
  bool strip_isolated_zwnj_ = true;
  std::size_t collapse_punct_run_ = 3;
  std::size_t longest_ = 0;
  // rule indices bucketed by first codepoint, longest first
  std::vector<std::pair<char32_t, std::vector<std::size_t>>> by_first_;
};

// Applies, in order: deletion of strip-set codepoints; one left-to-right
// pass of longest-match-first rule rewriting; removal of zero-width
// non-joiners that touch whitespace, text edges or other ZWNJs (when
// enabled); collapse of runs of >= collapse_punct_run identical punctuation
// codepoints to a single one. Idempotent for closed tables.
std::string standardize(std::string_view text, const CharMapTable& table);

StageResult standardize_corpus(const Corpus& corpus, const CharMapTable& table,
                               const ExecutionOptions& exec = {},
                               const TokenCounter& counter = count_tokens);

enum class Boundary { Paragraph, Sentence, Whitespace };

struct SplitConfig {
  std::size_t target_tokens = 512;
  std::vector<Boundary> boundary_preference{Boundary::Paragraph, Boundary::Sentence,
                                            Boundary::Whitespace};
  // Token-final codepoints that end a sentence.
  std::u32string sentence_end = U"۔؟.!?";

  void validate() const;
};

Boundary parse_boundary(std::string_view name);

// Cuts a document into chunks near target_tokens. Each cut lands in the
// window [ceil(0.5 T), floor(1.5 T)] tokens after the previous one, at the
// highest-priority boundary available there (ties go to the candidate
// closest to T, then the earlier one). Cuts also leave at least ceil(0.5 T)
// tokens behind when possible; a remainder of <= 1.5 T tokens becomes the
// last chunk. A document that fits in one chunk is returned unchanged;
// otherwise chunks are "<id>#k", k = 0, 1, ...
std::vector<Document> split_document(const Document& doc, const SplitConfig& cfg,
                                     const TokenCounter& counter = count_tokens);

StageResult split_corpus(const Corpus& corpus, const SplitConfig& cfg,
                         const ExecutionOptions& exec = {},
                         const TokenCounter& counter = count_tokens);

}  // namespace forge
