#pragma once

// Synthetic corpora and independent oracles shared by the unit and
// acceptance suites. Nothing here calls into the code paths it checks.

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "forge/document.hpp"

namespace forge::testing {

// Deterministic generator of pseudo-words.
class WordGen {
 public:
  explicit WordGen(std::uint64_t seed) : rng_(seed) {}

  // 4-7 letters from the Urdu alphabet (all in U+0600..U+06FF).
  std::string urdu_word();
  // 4-8 lowercase ASCII letters.
  std::string latin_word();
  // Never returns the same word twice, and never a word in `avoid`.
  std::string unique_urdu_word();
  std::string unique_latin_word();

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::mt19937_64& rng() { return rng_; }

  std::set<std::string> avoid;

 private:
  std::mt19937_64 rng_;
  std::set<std::string> issued_;
};

std::string join(const std::vector<std::string>& words, std::string_view sep = " ");

// Splits on ASCII space, tab and LF only; an oracle for whitespace token
// counting on texts built from those separators.
std::vector<std::string> ascii_split(const std::string& text);

// Removes ASCII space, tab, CR and LF.
std::string strip_ascii_space(const std::string& text);

// `total` tokens, exactly `urdu` of them Urdu words and the rest Latin
// words, interleaved evenly.
std::string mixed_text(WordGen& gen, std::size_t total, std::size_t urdu);

// Function words used as the stopword list in synthetic fixtures.
std::vector<std::string> synthetic_stopwords();

// Urdu text of `tokens` tokens where every third token is a stopword from
// synthetic_stopwords() and the rest are unique content words.
std::string clean_urdu_text(WordGen& gen, std::size_t tokens);

// Same content with runs of spaces and tabs inserted between tokens.
std::string respace(WordGen& gen, const std::string& text);

// 500 documents across sources "cc100" and "oscar":
//   100 non-Urdu (dropped by the language filter),
//    50 Urdu without stopwords (dropped by the quality filter),
//    60 whitespace-variant copies of clean documents: 40 in the source of
//       their original, 20 in the other source (dropped by dedup),
//   290 clean documents, 20 of which repeat one of their own lines.
struct MixedFixture {
  std::vector<Document> docs;
  std::size_t non_urdu = 0;
  std::size_t low_stopword = 0;
  std::size_t dup_in_source = 0;
  std::size_t dup_cross_source = 0;
  std::size_t clean = 0;
  std::set<std::string> non_urdu_ids;
  std::set<std::string> low_stopword_ids;
  std::set<std::string> dup_ids;
  // Tokens removed from clean documents by line dedup.
  std::uint64_t repeated_line_tokens = 0;
  std::vector<std::string> stopwords;
};

MixedFixture make_mixed_fixture(std::uint64_t seed = 20240501);

// Writes the fixture as two JSONL files (one per source) plus a stopword
// list and a pipeline config into dir. Returns the config path.
std::filesystem::path write_mixed_fixture(const MixedFixture& fx, const std::filesystem::path& dir);

// First occurrence of each whitespace-stripped text wins.
std::vector<std::string> brute_force_dedup_ids(const std::vector<Document>& docs);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

std::string slurp(const std::filesystem::path& path);
void spit(const std::filesystem::path& path, const std::string& content);

// Runs a shell command, returning its exit status.
int run_command(const std::string& command);

}  // namespace forge::testing
