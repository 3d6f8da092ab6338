#include "forge/dedup.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <unordered_map>

#include <fmt/format.h>

#include "forge/error.hpp"
#include "forge/unicode.hpp"

namespace forge {

std::string Fingerprint::hex() const { return fmt::format("{:016x}", bits); }

Fingerprint Fingerprint::from_hex(std::string_view hex16) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(hex16.data(), hex16.data() + hex16.size(), value, 16);
  if (hex16.size() != 16 || ec != std::errc{} || ptr != hex16.data() + hex16.size()) {
    throw DataError("bad fingerprint \"" + std::string(hex16) + "\" (expected 16 hex digits)");
  }
  return Fingerprint{value, false};
}

DedupMode parse_dedup_mode(std::string_view name) {
  if (name == "exact") return DedupMode::Exact;
  if (name == "near") return DedupMode::Near;
  throw ConfigError("unknown dedup mode \"" + std::string(name) + "\" (expected exact|near)");
}

void DedupConfig::validate() const {
  if (hamming_threshold < 0 || hamming_threshold > 64) {
    throw ConfigError(fmt::format("hamming threshold {} outside [0, 64]", hamming_threshold));
  }
  if (shingle_width < 1) throw ConfigError("shingle_width must be >= 1");
}

std::uint64_t shingle_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ kShingleHashSeed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finalizer: FNV-1a alone leaves the high bits poorly mixed.
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

Fingerprint simhash(std::string_view text, const DedupConfig& cfg) {
  const std::string stripped = unicode::remove_whitespace(text);
  if (stripped.empty()) return Fingerprint{0, true};

  std::vector<std::size_t> starts;
  unicode::for_each_codepoint(stripped, [&](char32_t, std::size_t offset, std::size_t) {
    starts.push_back(offset);
  });
  starts.push_back(stripped.size());
  const std::size_t cps = starts.size() - 1;
  const std::size_t width = std::min(cfg.shingle_width, cps);

  std::array<std::int64_t, 64> votes{};
  for (std::size_t i = 0; i + width <= cps; ++i) {
    const std::uint64_t h = shingle_hash(
        std::string_view(stripped).substr(starts[i], starts[i + width] - starts[i]));
    for (int bit = 0; bit < 64; ++bit) votes[bit] += ((h >> bit) & 1U) ? 1 : -1;
  }
  std::uint64_t bits = 0;
  for (int bit = 0; bit < 64; ++bit) {
    if (votes[bit] > 0) bits |= std::uint64_t{1} << bit;
  }
  return Fingerprint{bits, false};
}

std::vector<FingerprintRecord> read_fingerprints(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read fingerprint file " + path.string());
  std::vector<FingerprintRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError(fmt::format("{}:{}: expected \"id<TAB>hex16\"", path.string(), line_no));
    }
    try {
      records.push_back(FingerprintRecord{line.substr(0, tab), Fingerprint::from_hex(std::string_view(line).substr(tab + 1))});
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return records;
}

void write_fingerprints(const std::vector<FingerprintRecord>& records, std::ostream& out) {
  for (const auto& r : records) out << r.id << '\t' << r.fingerprint.hex() << '\n';
}

std::vector<FingerprintRecord> fingerprint_corpus(const Corpus& corpus, const DedupConfig& cfg,
                                                  const ExecutionOptions& exec) {
  cfg.validate();
  return parallel_map(std::span(corpus.documents()), exec.workers, [&](const Document& d) {
    return FingerprintRecord{d.id, simhash(d.text, cfg)};
  });
}

namespace {

struct Retained {
  Fingerprint fingerprint;
  // Index into the input corpus, or npos for a prior-run record.
  std::size_t index;
  const std::string* prior_id;
};

constexpr std::size_t kPrior = static_cast<std::size_t>(-1);

struct Group {
  std::unordered_map<std::uint64_t, std::vector<Retained>> exact;
  std::vector<Retained> near;
};

}  // namespace

StageResult dedup_documents(const Corpus& corpus, const DedupConfig& cfg, const DedupOptions& options) {
  cfg.validate();
  StageResult result{Corpus{}, StageReport::start(options.stage_name, corpus)};
  const Stopwatch clock;
  const auto fps = parallel_map(std::span(corpus.documents()), options.exec.workers,
                                [&](const Document& d) { return simhash(d.text, cfg); });

  Group prior;
  for (const auto& rec : options.prior) {
    const Retained r{rec.fingerprint, kPrior, &rec.id};
    if (cfg.mode == DedupMode::Exact) {
      prior.exact[rec.fingerprint.bits].push_back(r);
    } else {
      prior.near.push_back(r);
    }
  }

  std::unordered_map<std::string, Group> groups;
  std::uint64_t empty_docs = 0;
  std::vector<std::string> stripped_cache(corpus.size());
  auto stripped = [&](std::size_t i) -> const std::string& {
    if (stripped_cache[i].empty()) stripped_cache[i] = unicode::remove_whitespace(corpus[i].text);
    return stripped_cache[i];
  };

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Document& doc = corpus[i];
    const Fingerprint fp = fps[i];
    if (fp.empty) ++empty_docs;
    Group& group = groups[options.per_source ? doc.source : std::string{}];

    const Retained* match = nullptr;
    if (cfg.mode == DedupMode::Exact) {
      if (auto it = prior.exact.find(fp.bits); it != prior.exact.end()) match = &it->second.front();
      if (match == nullptr) {
        if (auto it = group.exact.find(fp.bits); it != group.exact.end()) {
          for (const auto& cand : it->second) {
            if (cand.fingerprint.empty == fp.empty && stripped(cand.index) == stripped(i)) {
              match = &cand;
              break;
            }
          }
        }
      }
    } else {
      auto scan = [&](const std::vector<Retained>& pool) -> const Retained* {
        for (const auto& cand : pool) {
          if (cand.fingerprint.empty == fp.empty &&
              hamming_distance(cand.fingerprint, fp) <= cfg.hamming_threshold) {
            return &cand;
          }
        }
        return nullptr;
      };
      match = scan(prior.near);
      if (match == nullptr) match = scan(group.near);
    }

    if (match != nullptr) {
      const std::string& kept = match->index == kPrior ? *match->prior_id : corpus[match->index].id;
      result.report.drop(doc, "dup_doc", kept);
      continue;
    }
    const Retained r{fp, i, nullptr};
    if (cfg.mode == DedupMode::Exact) {
      group.exact[fp.bits].push_back(r);
    } else {
      group.near.push_back(r);
    }
    result.corpus.push_back(doc);
  }
  result.report.counters["empty_fingerprints"] = empty_docs;
  result.report.finish(result.corpus);
  result.report.duration_ms = clock.elapsed_ms();
  return result;
}

Document dedup_lines(const Document& doc, const TokenCounter& counter) {
  const std::string_view text = doc.text;
  std::string out;
  out.reserve(text.size());
  std::unordered_map<std::string_view, bool> seen;
  bool removed = false;
  bool first = true;
  std::size_t pos = 0;
  while (true) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    const std::string_view key = unicode::trim_right(line);
    const bool keep = key.empty() || seen.try_emplace(key, true).second;
    if (keep) {
      if (!first) out.push_back('\n');
      out.append(line);
      first = false;
    } else {
      removed = true;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (!removed) return doc;
  return doc.with_text(std::move(out), counter);
}

StageResult dedup_lines_corpus(const Corpus& corpus, const ExecutionOptions& exec,
                               const TokenCounter& counter) {
  StageResult result{Corpus{}, StageReport::start("dedup_lines", corpus)};
  const Stopwatch clock;
  auto docs = parallel_map(std::span(corpus.documents()), exec.workers,
                           [&](const Document& d) { return dedup_lines(d, counter); });
  std::uint64_t changed = 0;
  std::uint64_t lines_removed = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].text != corpus[i].text) {
      ++changed;
      lines_removed += static_cast<std::uint64_t>(std::count(corpus[i].text.begin(), corpus[i].text.end(), '\n') -
                                                  std::count(docs[i].text.begin(), docs[i].text.end(), '\n'));
    }
    result.corpus.push_back(std::move(docs[i]));
  }
  result.report.counters["docs_changed"] = changed;
  result.report.counters["lines_removed"] = lines_removed;
  result.report.finish(result.corpus);
  result.report.duration_ms = clock.elapsed_ms();
  return result;
}

namespace {

StageResult identity_stage(const Corpus& corpus, std::string name) {
  StageResult result{corpus, StageReport::start(std::move(name), corpus)};
  result.report.enabled = false;
  result.report.finish(result.corpus);
  return result;
}

}  // namespace

StageResult dedup_pass(const Corpus& corpus, const DedupConfig& cfg, const DedupPassOptions& options) {
  cfg.validate();
  StageReport combined = StageReport::start("dedup", corpus);
  const Stopwatch clock;

  StageResult source_phase = identity_stage(corpus, "dedup_source");
  if (options.per_source) {
    DedupOptions opts{options.exec, options.prior, true, "dedup_source"};
    source_phase = dedup_documents(corpus, cfg, opts);
  }
  StageResult overall_phase = identity_stage(source_phase.corpus, "dedup_overall");
  if (options.overall) {
    // Prior fingerprints were already applied if the per-source phase ran.
    DedupOptions opts{options.exec, options.per_source ? std::vector<FingerprintRecord>{} : options.prior,
                      false, "dedup_overall"};
    overall_phase = dedup_documents(source_phase.corpus, cfg, opts);
  }
  StageResult lines_phase = identity_stage(overall_phase.corpus, "dedup_lines");
  if (options.lines) lines_phase = dedup_lines_corpus(overall_phase.corpus, options.exec, options.counter);

  for (const StageReport* phase : {&source_phase.report, &overall_phase.report, &lines_phase.report}) {
    for (const auto& [reason, count] : phase->drop_reasons) combined.drop_reasons[reason] += count;
    combined.dropped.insert(combined.dropped.end(), phase->dropped.begin(), phase->dropped.end());
  }
  combined.phases = {std::move(source_phase.report), std::move(overall_phase.report),
                     std::move(lines_phase.report)};
  combined.finish(lines_phase.corpus);
  combined.duration_ms = clock.elapsed_ms();
  return StageResult{std::move(lines_phase.corpus), std::move(combined)};
}

}  // namespace forge
