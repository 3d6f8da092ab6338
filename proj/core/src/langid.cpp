#include "forge/langid.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "forge/error.hpp"
#include "forge/unicode.hpp"

namespace forge {

std::vector<CodepointRange> default_urdu_ranges() {
  return {{0x0600, 0x06FF}, {0x0750, 0x077F}, {0xFB50, 0xFDFF}, {0xFE70, 0xFEFF}};
}

void LangFilterConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError(fmt::format("lang threshold {} outside [0, 1]", threshold));
  }
  auto sorted = script_ranges;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].lo > sorted[i].hi) {
      throw ConfigError(fmt::format("script range {}..{} has lo > hi",
                                    unicode::format_codepoint(sorted[i].lo),
                                    unicode::format_codepoint(sorted[i].hi)));
    }
    if (i > 0 && sorted[i].lo <= sorted[i - 1].hi) {
      throw ConfigError(fmt::format("script ranges {}..{} and {}..{} overlap",
                                    unicode::format_codepoint(sorted[i - 1].lo),
                                    unicode::format_codepoint(sorted[i - 1].hi),
                                    unicode::format_codepoint(sorted[i].lo),
                                    unicode::format_codepoint(sorted[i].hi)));
    }
  }
}

LanguageScore::LanguageScore(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(fmt::format("language score {} outside [0, 1]", value));
  }
}

LanguageScore score_language(std::string_view text, const LangFilterConfig& cfg) {
  const auto in_script = [&](char32_t cp) {
    return std::any_of(cfg.script_ranges.begin(), cfg.script_ranges.end(),
                       [cp](const CodepointRange& r) { return r.contains(cp); });
  };

  std::size_t classified = 0;
  std::size_t target = 0;
  for (std::string_view token : unicode::split_whitespace(text)) {
    std::size_t word_cps = 0;
    std::size_t target_cps = 0;
    unicode::for_each_codepoint(token, [&](char32_t cp, std::size_t, std::size_t) {
      if (unicode::classify(cp) != unicode::CharClass::Word) return;
      ++word_cps;
      if (in_script(cp)) ++target_cps;
    });
    if (word_cps == 0) continue;
    ++classified;
    if (2 * target_cps > word_cps) ++target;
  }
  if (classified == 0) return LanguageScore(0.0);
  return LanguageScore(static_cast<double>(target) / static_cast<double>(classified));
}

StageResult filter_language(const Corpus& corpus, const LangFilterConfig& cfg,
                            const ExecutionOptions& exec) {
  cfg.validate();
  StageResult result{Corpus{}, StageReport::start("lang", corpus)};
  const Stopwatch clock;
  const auto scores = parallel_map(std::span(corpus.documents()), exec.workers,
                                   [&](const Document& d) { return score_language(d.text, cfg).value(); });
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (scores[i] >= cfg.threshold) {
      result.corpus.push_back(corpus[i]);
    } else {
      result.report.drop(corpus[i], "lang_below_threshold", fmt::format("{:.3f}", scores[i]));
    }
  }
  result.report.finish(result.corpus);
  result.report.duration_ms = clock.elapsed_ms();
  return result;
}

}  // namespace forge
