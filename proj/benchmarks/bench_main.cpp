#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "forge/dedup.hpp"
#include "forge/langid.hpp"
#include "forge/mteval.hpp"
#include "forge/normalize.hpp"

namespace {

const std::vector<std::string> kWords = {"یہ", "ایک", "اردو", "جملہ", "ہے", "کتاب", "پاکستان", "لاہور",
                                         "كتاب", "يہ", "data", "model", "۔", "،", "text"};

std::string make_text(std::size_t tokens, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::string out;
  for (std::size_t i = 0; i < tokens; ++i) {
    if (i > 0) out += i % 20 == 0 ? "\n" : " ";
    out += kWords[rng() % kWords.size()];
  }
  return out;
}

void BM_Simhash(benchmark::State& state) {
  const std::string text = make_text(static_cast<std::size_t>(state.range(0)), 1);
  const forge::DedupConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(forge::simhash(text, cfg));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Simhash)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ExactDedup(benchmark::State& state) {
  std::vector<forge::Document> docs;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    docs.push_back(forge::Document::make("d" + std::to_string(i), "s", make_text(200, static_cast<std::uint64_t>(i % 800))));
  }
  const forge::Corpus corpus(docs);
  const forge::DedupConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(forge::dedup_documents(corpus, cfg, {{1}}));
}
BENCHMARK(BM_ExactDedup)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Standardize(benchmark::State& state) {
  const std::string text = make_text(static_cast<std::size_t>(state.range(0)), 2);
  const auto& table = forge::CharMapTable::urdu_default();
  for (auto _ : state) benchmark::DoNotOptimize(forge::standardize(text, table));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Standardize)->Arg(1000)->Arg(10000);

void BM_ScoreLanguage(benchmark::State& state) {
  const std::string text = make_text(static_cast<std::size_t>(state.range(0)), 3);
  const forge::LangFilterConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(forge::score_language(text, cfg));
}
BENCHMARK(BM_ScoreLanguage)->Arg(1000);

void BM_CorpusBleu(benchmark::State& state) {
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    hyps.push_back(make_text(25, static_cast<std::uint64_t>(2 * i)));
    refs.push_back(make_text(25, static_cast<std::uint64_t>(2 * i + 1)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(forge::corpus_bleu(hyps, refs, forge::Smoothing::Epsilon));
}
BENCHMARK(BM_CorpusBleu)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
