#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "forge/document.hpp"
#include "forge/parallel.hpp"
#include "forge/report.hpp"

namespace forge {

// 64-bit SimHash of the whitespace-stripped content.
struct Fingerprint {
  std::uint64_t bits = 0;
  // Set when the content was empty after whitespace removal.
  bool empty = false;

  std::string hex() const;
  static Fingerprint from_hex(std::string_view hex16);

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

inline int hamming_distance(Fingerprint a, Fingerprint b) {
  return std::popcount(a.bits ^ b.bits);
}

enum class DedupMode { Exact, Near };

DedupMode parse_dedup_mode(std::string_view name);

struct DedupConfig {
  DedupMode mode = DedupMode::Exact;
  int hamming_threshold = 3;  // near mode only
  std::size_t shingle_width = 4;

  void validate() const;
};

// Seed of the shingle hash. Changing it changes every fingerprint, so it is
// bumped together with the sidecar format version.
inline constexpr std::uint64_t kShingleHashSeed = 0x666f726765763031ULL;  // "forgev01"

// Hash of a byte string under kShingleHashSeed (FNV-1a folded through a
// splitmix64 finalizer).
std::uint64_t shingle_hash(std::string_view bytes);

// Whitespace is removed, overlapping shingle_width-codepoint shingles are
// hashed, and each of the 64 bits takes the sign of its summed +1/-1 votes
// (ties give 0). Content shorter than one shingle hashes as a single shingle.
Fingerprint simhash(std::string_view text, const DedupConfig& cfg);

// Registry of retained fingerprints, optionally seeded from a sidecar file of
// an earlier run.
struct FingerprintRecord {
  std::string id;
  Fingerprint fingerprint;
};

std::vector<FingerprintRecord> read_fingerprints(const std::filesystem::path& path);
// "id<TAB>hex16" per line.
void write_fingerprints(const std::vector<FingerprintRecord>& records, std::ostream& out);

struct DedupOptions {
  ExecutionOptions exec;
  // Fingerprints retained by earlier runs; matching documents are dropped
  // with the prior id as detail. Matching is on fingerprint alone.
  std::vector<FingerprintRecord> prior;
  // Restrict matches to documents with the same source tag.
  bool per_source = false;
  std::string stage_name = "dedup_documents";
};

// First occurrence wins, input order preserved. Exact mode drops a document
// when an earlier retained one has the same fingerprint and the same
// whitespace-stripped content. Near mode drops it when any retained
// fingerprint is within hamming_threshold. Drops use reason "dup_doc" with
// the kept id as detail.
StageResult dedup_documents(const Corpus& corpus, const DedupConfig& cfg,
                            const DedupOptions& options = {});

// Fingerprints of the documents in the corpus, in order.
std::vector<FingerprintRecord> fingerprint_corpus(const Corpus& corpus, const DedupConfig& cfg,
                                                  const ExecutionOptions& exec = {});

// Removes repeated lines, keeping the first occurrence. Lines compare after
// trimming trailing whitespace; whitespace-only lines are never removed.
Document dedup_lines(const Document& doc, const TokenCounter& counter = count_tokens);

StageResult dedup_lines_corpus(const Corpus& corpus, const ExecutionOptions& exec = {},
                               const TokenCounter& counter = count_tokens);

struct DedupPassOptions {
  ExecutionOptions exec;
  bool per_source = true;
  bool overall = true;
  bool lines = true;
  std::vector<FingerprintRecord> prior;
  TokenCounter counter = count_tokens;
};

// Per-source document dedup, then overall document dedup, then line dedup.
// The returned report ("dedup") carries one phase per step: dedup_source,
// dedup_overall, dedup_lines. Disabled phases appear as identity phases.
StageResult dedup_pass(const Corpus& corpus, const DedupConfig& cfg,
                       const DedupPassOptions& options = {});

}  // namespace forge
