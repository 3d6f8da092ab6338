#include <doctest.h>

#include "forge/error.hpp"
#include "forge/quality.hpp"
#include "support/fixtures.hpp"

using namespace forge;
using namespace forge::testing;

namespace {

// `total` distinct content words with `stops` stopwords and `flagged`
// flagged words spread through them.
std::string compose(WordGen& gen, std::size_t total, std::size_t stops, std::size_t flagged) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < total; ++i) {
    if (i < stops) {
      words.push_back("کا");
    } else if (i < stops + flagged) {
      words.push_back("گندا");
    } else {
      words.push_back(gen.unique_urdu_word());
    }
  }
  std::shuffle(words.begin(), words.end(), gen.rng());
  return join(words);
}

QualityConfig synthetic_config() {
  QualityConfig cfg;
  cfg.stopword_list = {"کا", "کی", "کے"};
  cfg.flagged_list = {"گندا"};
  return cfg;
}

WordGen make_gen(std::uint64_t seed) {
  WordGen gen(seed);
  gen.avoid = {"کا", "کی", "کے", "گندا"};
  return gen;
}

}  // namespace

TEST_SUITE("quality") {
  TEST_CASE("stopword ratio examples") {
    auto gen = make_gen(1);
    const auto cfg = synthetic_config();
    CHECK(stopword_ratio(Document::make("a", "s", "کا کی کے کا"), cfg) == 1.0);
    CHECK(stopword_ratio(Document::make("b", "s", compose(gen, 30, 3, 0)), cfg) == 0.1);
    CHECK(stopword_ratio(Document::make("c", "s", ""), cfg) == 0.0);
  }

  TEST_CASE("flagged ratio examples") {
    auto gen = make_gen(2);
    const auto cfg = synthetic_config();
    CHECK(flagged_ratio(Document::make("a", "s", compose(gen, 40, 5, 0)), cfg) == 0.0);
    CHECK(flagged_ratio(Document::make("b", "s", compose(gen, 40, 5, 1)), cfg) == 0.025);
    CHECK(flagged_ratio(Document::make("c", "s", compose(gen, 40, 5, 2)), cfg) == 0.05);
  }

  TEST_CASE("word keys ignore edge punctuation and ASCII case") {
    CHECK(word_key("کا۔") == "کا");
    CHECK(word_key("«کا»") == "کا");
    CHECK(word_key("The,") == "the");
    CHECK(word_key("...") == "");
    CHECK(word_key("e-mail") == "e-mail");
    const auto cfg = synthetic_config();
    CHECK(stopword_ratio(Document::make("a", "s", "کا، x"), cfg) == 0.5);
  }

  TEST_CASE("ratios stay in range") {
    auto gen = make_gen(3);
    const auto cfg = synthetic_config();
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t total = gen.below(60);
      const std::size_t stops = total ? gen.below(total + 1) : 0;
      const std::size_t flagged = total - stops ? gen.below(total - stops + 1) : 0;
      const auto doc = Document::make("d", "s", compose(gen, total, stops, flagged));
      const double s = stopword_ratio(doc, cfg);
      const double f = flagged_ratio(doc, cfg);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
      CHECK(s + f <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("threshold boundaries") {
    auto gen = make_gen(4);
    const auto cfg = synthetic_config();
    Corpus c;
    c.push_back(Document::make("stop_exact", "s", compose(gen, 30, 3, 0)));           // 0.1
    c.push_back(Document::make("flag_exact", "s", compose(gen, 40, 8, 1)));           // 0.025
    c.push_back(Document::make("stop_low", "s", compose(gen, 1000, 99, 0)));          // 0.099
    c.push_back(Document::make("flag_high", "s", compose(gen, 1000, 200, 26)));       // 0.026
    c.push_back(Document::make("empty", "s", " \n "));
    c.push_back(Document::make("both", "s", compose(gen, 100, 5, 10)));               // stopword first
    const auto r = filter_quality(c, cfg);
    REQUIRE(r.corpus.size() == 2);
    CHECK(r.corpus[0].id == "stop_exact");
    CHECK(r.corpus[1].id == "flag_exact");
    REQUIRE(r.report.dropped.size() == 4);
    CHECK(r.report.dropped[0] == DropRecord{"stop_low", "stopword_low", "0.0990"});
    CHECK(r.report.dropped[1].reason == "flagged_high");
    CHECK(r.report.dropped[2].reason == "empty");
    CHECK(r.report.dropped[3].reason == "stopword_low");
    CHECK(r.report.drop_reasons.at("stopword_low") == 2);
    CHECK(r.report.drop_reasons.at("flagged_high") == 1);
    CHECK(r.report.drop_reasons.at("empty") == 1);
    CHECK(r.report.docs_in == r.report.docs_out + r.report.dropped_docs());
    CHECK(r.report.tokens_out == r.corpus.total_tokens());

    const auto again = filter_quality(r.corpus, cfg);
    CHECK(again.corpus == r.corpus);
  }

  TEST_CASE("bundled stopword list") {
    const auto& words = urdu_stopwords();
    CHECK(words.size() >= 150);
    CHECK(words.contains("کے"));
    CHECK(words.contains("ہے"));
    const auto doc = Document::make("a", "s", "یہ کتاب میز پر ہے");
    CHECK(stopword_ratio(doc, QualityConfig{}) >= 0.4);
  }

  TEST_CASE("word lists are standardized on load") {
    // Arabic yeh and kaf in the list file match Urdu forms in text.
    const auto words = parse_word_list("\xEF\xBB\xBF\n  كي  \nFoo\n", CharMapTable::urdu_default());
    CHECK(words.contains("کی"));
    CHECK(words.contains("foo"));
    CHECK_THROWS_AS(load_word_list("/nonexistent/list.txt", CharMapTable::urdu_default()), ConfigError);
  }

  TEST_CASE("config validation") {
    QualityConfig cfg;
    cfg.stopword_threshold = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.stopword_threshold = 0.1;
    cfg.flagged_threshold = 2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("PII examples") {
    const auto& rules = PiiRuleSet::defaults();
    auto r = scrub_pii("contact ali@example.com now", rules);
    CHECK(r.text == "contact <PII:EMAIL> now");
    CHECK(r.replacements == std::map<std::string, std::uint64_t>{{"EMAIL", 1}});
    r = scrub_pii("شناختی کارڈ 35202-1234567-1 ہے", rules);
    CHECK(r.text == "شناختی کارڈ <PII:ID> ہے");
    CHECK(r.replacements == std::map<std::string, std::uint64_t>{{"ID", 1}});
    r = scrub_pii("کوئی ذاتی معلومات نہیں", rules);
    CHECK(r.text == "کوئی ذاتی معلومات نہیں");
    CHECK(r.replacements.empty());
  }

  TEST_CASE("PII positives are fully scrubbed") {
    struct Case {
      const char* input;
      const char* expected;
    };
    const Case cases[] = {
        {"ali@example.com", "<PII:EMAIL>"},
        {"mail: sara.khan@uni.edu.pk", "mail: <PII:EMAIL>"},
        {"a_b+tag@mail-server.co.uk.", "<PII:EMAIL>."},
        {"ای میل: info@company.pk پر", "ای میل: <PII:EMAIL> پر"},
        {"USER99@EXAMPLE.ORG", "<PII:EMAIL>"},
        {"x@y.io, z@w.com", "<PII:EMAIL>, <PII:EMAIL>"},
        {"+92 300 1234567", "<PII:PHONE>"},
        {"+92-300-1234567", "<PII:PHONE>"},
        {"+923001234567", "<PII:PHONE>"},
        {"call +92 321 7654321 now", "call <PII:PHONE> now"},
        {"0092 300 1234567", "<PII:PHONE>"},
        {"+92 (42) 35761234", "<PII:PHONE>"},
        {"0300-1234567", "<PII:PHONE>"},
        {"03001234567", "<PII:PHONE>"},
        {"042-35761234", "<PII:PHONE>"},
        {"فون: 0333 4455667 پر کال کریں", "فون: <PII:PHONE> پر کال کریں"},
        {"051-111-2222", "<PII:PHONE>"},
        {"+44 20 7946 0958", "<PII:PHONE>"},
        {"35202-1234567-1", "<PII:ID>"},
        {"CNIC 42101-9876543-2.", "CNIC <PII:ID>."},
        {"3520212345671", "<PII:ID>"},
        {"شناختی نمبر 61101-1111111-9 درج", "شناختی نمبر <PII:ID> درج"},
        {"ali@example.com +923001234567 35202-1234567-1", "<PII:EMAIL> <PII:PHONE> <PII:ID>"},
    };
    for (const auto& c : cases) {
      CAPTURE(c.input);
      CHECK(scrub_pii(c.input, PiiRuleSet::defaults()).text == c.expected);
    }
    CHECK(std::size(cases) >= 20);
  }

  TEST_CASE("PII controls are left alone") {
    const char* const controls[] = {
        "2024-05-01",       "01/05/2024",        "05-01-2024",      "1 جنوری 2024",   "10:30 AM",
        "Rs. 1,250",        "$19.99",            "Rs 15,000/-",     "قیمت 4500 روپے", "€ 3.50",
        "v1.2.3",           "version 10.0.19045", "Python 3.11.4",   "build 2024.05.1", "1.0.0-rc1",
        "ISBN 978-3-16-148410-0", "page 123",   "50%",             "1,234,567",       "room 12-B",
        "score 98.6",       "@handle",           "user@localhost",  "a@b",             "1998-2003",
    };
    for (const char* c : controls) {
      CAPTURE(c);
      const auto r = scrub_pii(c, PiiRuleSet::defaults());
      CHECK(r.text == c);
      CHECK(r.replacements.empty());
    }
    CHECK(std::size(controls) >= 20);
  }

  TEST_CASE("scrub is idempotent") {
    WordGen gen(5);
    const char* const pieces[] = {"ali@example.com", "+92 300 1234567", "35202-1234567-1", "0300-1234567",
                                  "2024-05-01",      "Rs. 1,250",       "اردو",            "v1.2.3"};
    for (int trial = 0; trial < 300; ++trial) {
      std::string text;
      for (std::size_t i = 0, n = gen.below(8); i < n; ++i) text += std::string(pieces[gen.below(8)]) + " ";
      const auto once = scrub_pii(text, PiiRuleSet::defaults());
      const auto twice = scrub_pii(once.text, PiiRuleSet::defaults());
      CHECK(twice.text == once.text);
      CHECK(twice.replacements.empty());
    }
  }

  TEST_CASE("rule set validation") {
    CHECK_THROWS_AS(PiiRuleSet({{"X", "(", "<PII:X>"}}), ConfigError);
    CHECK_THROWS_AS(PiiRuleSet({{"X", "a", "[X]"}}), ConfigError);
    CHECK_THROWS_AS(PiiRuleSet({{"X", "PII", "<PII:X>"}}), ConfigError);  // replacement would match
    CHECK_THROWS_AS(PiiRuleSet::from_json("[{\"name\": \"X\"}]"), ConfigError);
    CHECK_NOTHROW(PiiRuleSet({{"NUM", "\\d+", "<PII:NUM>"}}));
  }

  TEST_CASE("scrub_corpus counts per rule") {
    Corpus c;
    c.push_back(Document::make("a", "s", "ali@example.com اور 0300-1234567"));
    c.push_back(Document::make("b", "s", "صاف متن"));
    c.push_back(Document::make("c", "s", "x@y.io z@w.com"));
    const auto r = scrub_corpus(c, PiiRuleSet::defaults(), {2});
    CHECK(r.report.counters.at("EMAIL") == 3);
    CHECK(r.report.counters.at("PHONE") == 1);
    CHECK(r.report.counters.at("docs_scrubbed") == 2);
    CHECK(r.corpus[0].text == "<PII:EMAIL> اور <PII:PHONE>");
    CHECK(r.corpus[0].token_count == 3);
    CHECK(r.report.docs_out == 3);
  }
}
