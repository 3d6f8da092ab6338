#include "support/fixtures.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace forge::testing {

namespace {

const std::vector<std::string> kUrduLetters = {
    "ا", "ب", "پ", "ت", "ٹ", "ث", "ج", "چ", "ح", "خ", "د", "ڈ", "ذ", "ر", "ڑ", "ز", "ژ", "س", "ش",
    "ص", "ض", "ط", "ظ", "ع", "غ", "ف", "ق", "ک", "گ", "ل", "م", "ن", "و", "ہ", "ھ", "ی", "ے"};

}  // namespace

std::string WordGen::urdu_word() {
  const std::size_t len = 4 + below(4);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += kUrduLetters[below(kUrduLetters.size())];
  return w;
}

std::string WordGen::latin_word() {
  const std::size_t len = 4 + below(5);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + below(26)));
  return w;
}

std::string WordGen::unique_urdu_word() {
  while (true) {
    std::string w = urdu_word();
    if (!avoid.contains(w) && issued_.insert(w).second) return w;
  }
}

std::string WordGen::unique_latin_word() {
  while (true) {
    std::string w = latin_word();
    if (!avoid.contains(w) && issued_.insert(w).second) return w;
  }
}

std::string join(const std::vector<std::string>& words, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += sep;
    out += words[i];
  }
  return out;
}

std::vector<std::string> ascii_split(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n') {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string strip_ascii_space(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') out.push_back(c);
  }
  return out;
}

std::string mixed_text(WordGen& gen, std::size_t total, std::size_t urdu) {
  std::vector<std::string> words;
  // Bresenham-style interleave: token i is Urdu when floor((i+1)*u/t) > floor(i*u/t).
  for (std::size_t i = 0; i < total; ++i) {
    const bool is_urdu = (i + 1) * urdu / total > i * urdu / total;
    words.push_back(is_urdu ? gen.urdu_word() : gen.latin_word());
  }
  return join(words);
}

std::vector<std::string> synthetic_stopwords() {
  return {"کا", "کی", "کے", "ہے", "میں", "سے", "اور", "کو", "نے", "پر"};
}

std::string clean_urdu_text(WordGen& gen, std::size_t tokens) {
  const auto stops = synthetic_stopwords();
  std::vector<std::string> lines;
  std::vector<std::string> line;
  for (std::size_t i = 0; i < tokens; ++i) {
    line.push_back(i % 3 == 2 ? stops[gen.below(stops.size())] : gen.unique_urdu_word());
    if (line.size() == 10) {
      lines.push_back(join(line));
      line.clear();
    }
  }
  if (!line.empty()) lines.push_back(join(line));
  return join(lines, "\n");
}

std::string respace(WordGen& gen, const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == ' ') {
      static const char* const kGaps[] = {" ", "  ", "\t", " \t ", "   "};
      out += kGaps[gen.below(5)];
    } else {
      out.push_back(c);
    }
  }
  return out;
}

MixedFixture make_mixed_fixture(std::uint64_t seed) {
  MixedFixture fx;
  WordGen gen(seed);
  const auto stops = synthetic_stopwords();
  gen.avoid.insert(stops.begin(), stops.end());
  fx.stopwords = stops;

  std::vector<Document> cc100;
  std::vector<Document> oscar;
  std::size_t next_id = 0;
  auto make_id = [&](const char* prefix) { return std::string(prefix) + std::to_string(next_id++); };

  auto add = [&](std::vector<Document>& bucket, const std::string& source, const char* prefix, std::string text) {
    bucket.push_back(Document::make(make_id(prefix), source, std::move(text)));
    return bucket.back().id;
  };

  // 290 clean documents: 160 in cc100, 130 in oscar.
  for (std::size_t i = 0; i < 290; ++i) {
    std::string text = clean_urdu_text(gen, 30 + gen.below(61));
    if (i % 14 == 0 && i / 14 < 20) {
      // Repeat the first line at the end.
      const std::string first_line = text.substr(0, text.find('\n'));
      if (first_line.size() < text.size()) {
        text += "\n" + first_line;
        fx.repeated_line_tokens += ascii_split(first_line).size();
      }
    }
    add(i < 160 ? cc100 : oscar, i < 160 ? "cc100" : "oscar", "clean-", std::move(text));
    ++fx.clean;
  }
  // 100 non-Urdu: half pure Latin, half at Urdu fraction 0.5.
  for (std::size_t i = 0; i < 100; ++i) {
    const std::size_t total = 30 + gen.below(40);
    std::string text = i % 2 == 0 ? mixed_text(gen, total, 0) : mixed_text(gen, total, total / 2);
    fx.non_urdu_ids.insert(add(i % 2 == 0 ? cc100 : oscar, i % 2 == 0 ? "cc100" : "oscar", "latin-", std::move(text)));
    ++fx.non_urdu;
  }
  // 50 Urdu documents without stopwords.
  for (std::size_t i = 0; i < 50; ++i) {
    std::vector<std::string> words;
    const std::size_t total = 30 + gen.below(40);
    for (std::size_t k = 0; k < total; ++k) words.push_back(gen.unique_urdu_word());
    fx.low_stopword_ids.insert(add(i % 2 == 0 ? cc100 : oscar, i % 2 == 0 ? "cc100" : "oscar", "nostop-", join(words)));
    ++fx.low_stopword;
  }

  // Interleave deterministically before planting duplicates.
  std::shuffle(cc100.begin(), cc100.end(), gen.rng());
  std::shuffle(oscar.begin(), oscar.end(), gen.rng());

  auto clean_indices = [](const std::vector<Document>& bucket) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      if (bucket[i].id.starts_with("clean-")) idx.push_back(i);
    }
    return idx;
  };

  // 40 in-source duplicates (20 per source), each inserted after its original.
  for (auto* bucket : {&cc100, &oscar}) {
    const std::string source = bucket == &cc100 ? "cc100" : "oscar";
    for (std::size_t k = 0; k < 20; ++k) {
      const auto idx = clean_indices(*bucket);
      const std::size_t orig = idx[gen.below(idx.size())];
      const std::size_t pos = orig + 1 + gen.below(bucket->size() - orig);
      Document dup = Document::make(make_id("dup-"), source, respace(gen, (*bucket)[orig].text));
      fx.dup_ids.insert(dup.id);
      bucket->insert(bucket->begin() + static_cast<std::ptrdiff_t>(pos), std::move(dup));
      ++fx.dup_in_source;
    }
  }
  // 20 cross-source duplicates: originals in cc100, copies in oscar. The
  // cc100 file is ingested first, so the original always comes first.
  {
    const auto idx = clean_indices(cc100);
    std::vector<std::size_t> picks;
    while (picks.size() < 20) {
      const std::size_t p = idx[gen.below(idx.size())];
      if (std::find(picks.begin(), picks.end(), p) == picks.end()) picks.push_back(p);
    }
    for (std::size_t p : picks) {
      Document dup = Document::make(make_id("xdup-"), "oscar", respace(gen, cc100[p].text));
      fx.dup_ids.insert(dup.id);
      const std::size_t pos = gen.below(oscar.size() + 1);
      oscar.insert(oscar.begin() + static_cast<std::ptrdiff_t>(pos), std::move(dup));
      ++fx.dup_cross_source;
    }
  }

  fx.docs = std::move(cc100);
  fx.docs.insert(fx.docs.end(), oscar.begin(), oscar.end());
  return fx;
}

std::filesystem::path write_mixed_fixture(const MixedFixture& fx, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "data");
  std::ofstream cc(dir / "data" / "cc100.jsonl", std::ios::binary);
  std::ofstream os(dir / "data" / "oscar.jsonl", std::ios::binary);
  for (const auto& d : fx.docs) {
    (d.source == "cc100" ? cc : os) << to_jsonl_line(d) << '\n';
  }
  spit(dir / "stopwords.txt", join(fx.stopwords, "\n") + "\n");
  const auto config = dir / "pipeline.json";
  spit(config, R"({
  "workers": 1,
  "lang": {"enabled": true, "threshold": 0.9},
  "normalize": {"enabled": true},
  "quality": {"enabled": true, "stopwords": "stopwords.txt", "stopword_threshold": 0.1, "flagged_threshold": 0.025},
  "pii": {"enabled": true},
  "dedup": {"enabled": true, "mode": "exact"},
  "split": {"enabled": true, "target_tokens": 512}
}
)");
  return config;
}

std::vector<std::string> brute_force_dedup_ids(const std::vector<Document>& docs) {
  std::vector<std::string> kept_ids;
  std::vector<std::string> kept_texts;
  for (const auto& d : docs) {
    const std::string key = strip_ascii_space(d.text);
    bool seen = false;
    for (const auto& k : kept_texts) {
      if (k == key) {
        seen = true;
        break;
      }
    }
    if (!seen) {
      kept_texts.push_back(key);
      kept_ids.push_back(d.id);
    }
  }
  return kept_ids;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("forge-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

}  // namespace forge::testing
