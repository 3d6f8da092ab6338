#include <doctest.h>

#include <cmath>
#include <map>

#include "forge/error.hpp"
#include "forge/mteval.hpp"
#include "support/fixtures.hpp"

using namespace forge;
using namespace forge::testing;

namespace {

// Straightforward clipped-count BLEU used as a test oracle.
double oracle_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs, bool epsilon) {
  double matches[4] = {0, 0, 0, 0};
  double totals[4] = {0, 0, 0, 0};
  double c = 0;
  double r = 0;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    const auto h = ascii_split(hyps[s]);
    const auto g = ascii_split(refs[s]);
    c += static_cast<double>(h.size());
    r += static_cast<double>(g.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      std::map<std::string, int> hc;
      std::map<std::string, int> rc;
      for (std::size_t i = 0; i + n <= h.size(); ++i) {
        std::string key;
        for (std::size_t k = 0; k < n; ++k) key += h[i + k] + "\x1f";
        ++hc[key];
      }
      for (std::size_t i = 0; i + n <= g.size(); ++i) {
        std::string key;
        for (std::size_t k = 0; k < n; ++k) key += g[i + k] + "\x1f";
        ++rc[key];
      }
      for (const auto& [k, v] : hc) {
        totals[n - 1] += v;
        matches[n - 1] += std::min(v, rc[k]);
      }
    }
  }
  if (c == 0) return 0;
  double log_sum = 0;
  for (int k = 0; k < 4; ++k) {
    if (totals[k] == 0) return 0;
    double p = matches[k] / totals[k];
    if (matches[k] == 0) {
      if (!epsilon) return 0;
      p = 1.0 / (2.0 * totals[k]);
    }
    log_sum += std::log(p) / 4.0;
  }
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return 100.0 * bp * std::exp(log_sum);
}

BleuResult bleu(const std::vector<std::string>& h, const std::vector<std::string>& r, Smoothing s = Smoothing::None) {
  return corpus_bleu(h, r, s);
}

std::vector<std::string> sentences(WordGen& gen, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(mixed_text(gen, 3 + gen.below(12), 0));
  return out;
}

}  // namespace

TEST_SUITE("mteval") {
  TEST_CASE("self-BLEU is 100") {
    WordGen gen(1);
    for (int trial = 0; trial < 20; ++trial) {
      const auto refs = sentences(gen, 1 + gen.below(20));
      const auto r = bleu(refs, refs);
      CHECK(r.score == doctest::Approx(100.0).epsilon(1e-12));
      for (double p : r.precisions) CHECK(p == 1.0);
      CHECK(r.brevity_penalty == 1.0);
    }
  }

  TEST_CASE("disjoint vocabulary scores 0") {
    const auto r = bleu({"a b c d"}, {"e f g h"});
    CHECK(r.score == 0.0);
    CHECK(r.matches[0] == 0);
  }

  TEST_CASE("hand-computed fixture 1: missing article") {
    const auto r = bleu({"the cat sat on mat"}, {"the cat sat on the mat"});
    CHECK(r.matches == std::array<std::size_t, 4>{5, 3, 2, 1});
    CHECK(r.totals == std::array<std::size_t, 4>{5, 4, 3, 2});
    CHECK(r.precisions[0] == doctest::Approx(1.0));
    CHECK(r.precisions[1] == doctest::Approx(0.75));
    CHECK(r.precisions[2] == doctest::Approx(2.0 / 3.0));
    CHECK(r.precisions[3] == doctest::Approx(0.5));
    CHECK(r.brevity_penalty == doctest::Approx(std::exp(1.0 - 6.0 / 5.0)));
    const double expected = 100.0 * std::exp(-0.2) * std::pow(1.0 * 0.75 * (2.0 / 3.0) * 0.5, 0.25);
    CHECK(std::abs(r.score - expected) < 1e-6);
    CHECK(std::abs(r.score - 57.893007) < 1e-6);
  }

  TEST_CASE("hand-computed fixture 2: clipping and epsilon smoothing") {
    const auto none = bleu({"the the the the"}, {"the cat"});
    CHECK(none.matches == std::array<std::size_t, 4>{1, 0, 0, 0});
    CHECK(none.precisions[0] == 0.25);
    CHECK(none.score == 0.0);
    const auto eps = bleu({"the the the the"}, {"the cat"}, Smoothing::Epsilon);
    CHECK(eps.precisions[1] == doctest::Approx(1.0 / 6.0));
    CHECK(eps.precisions[2] == doctest::Approx(1.0 / 4.0));
    CHECK(eps.precisions[3] == doctest::Approx(1.0 / 2.0));
    CHECK(eps.brevity_penalty == 1.0);
    CHECK(std::abs(eps.score - 100.0 * std::pow(1.0 / 192.0, 0.25)) < 1e-6);
  }

  TEST_CASE("hand-computed fixture 3: corpus-level sums") {
    const auto r = bleu({"a b c d e", "x y z"}, {"a b c d e", "x y w q"});
    CHECK(r.matches == std::array<std::size_t, 4>{7, 5, 3, 2});
    CHECK(r.totals == std::array<std::size_t, 4>{8, 6, 4, 2});
    CHECK(r.hyp_length == 8);
    CHECK(r.ref_length == 9);
    const double expected =
        100.0 * std::exp(1.0 - 9.0 / 8.0) * std::pow((7.0 / 8.0) * (5.0 / 6.0) * (3.0 / 4.0) * 1.0, 0.25);
    CHECK(std::abs(r.score - expected) < 1e-6);
  }

  TEST_CASE("agrees with the oracle on random corpora") {
    WordGen gen(2);
    const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::string> hyps;
      std::vector<std::string> refs;
      for (std::size_t s = 0, n = 1 + gen.below(6); s < n; ++s) {
        std::vector<std::string> h;
        std::vector<std::string> g;
        for (std::size_t i = 0, k = gen.below(10); i < k; ++i) h.push_back(vocab[gen.below(vocab.size())]);
        for (std::size_t i = 0, k = 1 + gen.below(10); i < k; ++i) g.push_back(vocab[gen.below(vocab.size())]);
        hyps.push_back(join(h));
        refs.push_back(join(g));
      }
      CHECK(bleu(hyps, refs).score == doctest::Approx(oracle_bleu(hyps, refs, false)).epsilon(1e-9));
      CHECK(bleu(hyps, refs, Smoothing::Epsilon).score ==
            doctest::Approx(oracle_bleu(hyps, refs, true)).epsilon(1e-9));
    }
  }

  TEST_CASE("permutation invariance") {
    WordGen gen(3);
    const auto refs = sentences(gen, 30);
    std::vector<std::string> hyps;
    for (const auto& r : refs) {
      auto words = ascii_split(r);
      if (words.size() > 2) words[gen.below(words.size())] = "x";
      hyps.push_back(join(words));
    }
    const double base = bleu(hyps, refs, Smoothing::Epsilon).score;
    std::vector<std::size_t> order(refs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int trial = 0; trial < 100; ++trial) {
      std::shuffle(order.begin(), order.end(), gen.rng());
      std::vector<std::string> h;
      std::vector<std::string> r;
      for (std::size_t i : order) {
        h.push_back(hyps[i]);
        r.push_back(refs[i]);
      }
      CHECK(bleu(h, r, Smoothing::Epsilon).score == base);
    }
  }

  TEST_CASE("emptying a hypothesis never raises the score") {
    WordGen gen(4);
    const auto refs = sentences(gen, 12);
    auto hyps = refs;
    for (auto& h : hyps) h += " extra";
    for (auto smoothing : {Smoothing::None, Smoothing::Epsilon}) {
      auto current = hyps;
      double previous = bleu(current, refs, smoothing).score;
      for (std::size_t i = 0; i < current.size(); ++i) {
        current[i].clear();
        const double now = bleu(current, refs, smoothing).score;
        CHECK(now <= previous);
        previous = now;
      }
      CHECK(previous == 0.0);
    }
  }

  TEST_CASE("short hypotheses give zero higher-order precision") {
    const auto r = bleu({"a b c", "d e"}, {"a b c d", "d e f"});
    CHECK(r.totals[3] == 0);
    CHECK(r.precisions[3] == 0.0);
    CHECK(r.score == 0.0);
    CHECK(bleu({"a b c", "d e"}, {"a b c d", "d e f"}, Smoothing::Epsilon).score == 0.0);
  }

  TEST_CASE("input errors") {
    CHECK_THROWS_AS(bleu({}, {}), DataError);
    CHECK_THROWS_AS(bleu({"a"}, {"a", "b"}), DataError);
    CHECK_THROWS_AS(parse_smoothing("add-one"), ConfigError);
  }

  TEST_CASE("reference copy beats shuffled tokens") {
    WordGen gen(5);
    EvalSet set;
    set.name = "inhouse";
    for (int i = 0; i < 5; ++i) set.references.push_back(mixed_text(gen, 8, 4));
    std::vector<std::string> shuffled;
    for (const auto& r : set.references) {
      auto words = ascii_split(r);
      std::reverse(words.begin(), words.end());
      shuffled.push_back(join(words));
    }
    set.systems = {{"shuffled", shuffled}, {"copy", set.references}};
    const std::vector<EvalSet> sets{set};
    const auto cmp = compare_systems(sets, Smoothing::Epsilon);
    REQUIRE(cmp.best[0].has_value());
    CHECK(cmp.systems[*cmp.best[0]] == "copy");
    CHECK(cmp.cells[1][0]->score == doctest::Approx(100.0));
    CHECK(cmp.cells[0][0]->score == doctest::Approx(oracle_bleu(shuffled, set.references, true)));
    const auto table = render_comparison(cmp, ReportFormat::Table);
    CHECK(table.find("100.00*") != std::string::npos);
  }

  TEST_CASE("four systems by three sets") {
    WordGen gen(6);
    std::vector<EvalSet> sets;
    for (const char* name : {"tico19", "tatoeba", "inhouse"}) {
      EvalSet s;
      s.name = name;
      s.references = sentences(gen, 10);
      for (const char* sys : {"base", "ft", "gpt", "copy"}) {
        std::vector<std::string> hyps;
        for (const auto& r : s.references) {
          auto words = ascii_split(r);
          if (std::string(sys) != "copy") words.resize(words.size() - 1 - gen.below(2));
          hyps.push_back(join(words));
        }
        s.systems.push_back({sys, hyps});
      }
      sets.push_back(std::move(s));
    }
    const auto cmp = compare_systems(sets, Smoothing::Epsilon);
    CHECK(cmp.systems.size() == 4);
    CHECK(cmp.sets.size() == 3);
    for (const auto& row : cmp.cells) {
      REQUIRE(row.size() == 3);
      for (const auto& cell : row) CHECK(cell.has_value());
    }
    for (const auto& b : cmp.best) CHECK(cmp.systems[*b] == "copy");
    const auto table = render_comparison(cmp, ReportFormat::Table);
    CHECK(table.starts_with("Model"));
    CHECK(table.find("tatoeba") != std::string::npos);
    const auto json = render_comparison(cmp, ReportFormat::Json);
    CHECK(json.find("\"best\"") != std::string::npos);
    CHECK(json.find("\"copy\"") != std::string::npos);
  }

  TEST_CASE("manifest loading") {
    const auto dir = temp_dir("mteval-manifest");
    spit(dir / "refs.txt", "a b c d\ne f g h\n");
    spit(dir / "sys.txt", "a b c d\ne f g x\n");
    spit(dir / "manifest.json", R"({"name": "toy", "refs_path": "refs.txt", "systems": {"s": "sys.txt"}})");
    const auto set = load_eval_manifest(dir / "manifest.json");
    CHECK(set.name == "toy");
    CHECK(set.references.size() == 2);
    REQUIRE(set.systems.size() == 1);
    CHECK(set.systems[0].hypotheses[1] == "e f g x");
    spit(dir / "short.txt", "a b c d\n");
    spit(dir / "bad.json", R"({"name": "toy", "refs_path": "refs.txt", "systems": {"s": "short.txt"}})");
    CHECK_THROWS_AS(load_eval_manifest(dir / "bad.json"), DataError);
    CHECK_THROWS_AS(load_eval_manifest(dir / "missing.json"), ConfigError);
  }
}
