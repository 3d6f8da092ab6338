#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace forge {

using Meta = std::map<std::string, std::string>;

// Token counter used for accounting. The default is count_tokens; any
// replacement must be a pure function of the text.
using TokenCounter = std::function<std::size_t(std::string_view)>;

// Number of maximal runs of non-whitespace codepoints.
std::size_t count_tokens(std::string_view text);

// One corpus record. Stages never mutate a Document; they emit new ones.
struct Document {
  std::string id;
  std::string source;
  std::string text;
  Meta meta;
  std::size_t token_count = 0;

  static Document make(std::string id, std::string source, std::string text, Meta meta = {},
                       const TokenCounter& counter = count_tokens);

  // Copy with replaced text and recomputed token_count.
  Document with_text(std::string new_text, const TokenCounter& counter = count_tokens) const;

  friend bool operator==(const Document&, const Document&) = default;
};

struct SourceCount {
  std::string source;
  std::size_t documents = 0;
  std::uint64_t tokens = 0;

  friend bool operator==(const SourceCount&, const SourceCount&) = default;
};

// Ordered document sequence with unique, non-empty ids.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Document> docs);

  // Throws DataError on an empty or duplicate id.
  void push_back(Document doc);

  const std::vector<Document>& documents() const { return docs_; }
  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }
  const Document& operator[](std::size_t i) const { return docs_[i]; }
  auto begin() const { return docs_.begin(); }
  auto end() const { return docs_.end(); }
  bool contains(std::string_view id) const;

  // Per-source document and token counts, in order of first appearance.
  const std::vector<SourceCount>& manifest() const { return manifest_; }
  std::uint64_t total_tokens() const { return total_tokens_; }

  friend bool operator==(const Corpus& a, const Corpus& b) { return a.docs_ == b.docs_; }

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<SourceCount> manifest_;
  std::unordered_map<std::string, std::size_t> source_index_;
  std::uint64_t total_tokens_ = 0;
};

struct ReadOptions {
  // Source tag for records without one. Empty means "use the file stem".
  std::string default_source;
  TokenCounter counter = count_tokens;
};

// Reads JSON Lines. Errors (DataError) cite the line number and byte offset.
// Blank lines are skipped; a leading UTF-8 BOM is stripped.
Corpus read_jsonl(const std::filesystem::path& path, const ReadOptions& options = {});
Corpus read_jsonl(std::istream& in, std::string_view origin, const ReadOptions& options = {});

// Reads several files into one corpus; ids must be unique across all of them.
Corpus read_jsonl_files(const std::vector<std::filesystem::path>& paths,
                        const ReadOptions& options = {});

// One line, no trailing newline. Field order: id, source, text, meta, token_count.
std::string to_jsonl_line(const Document& doc);

void write_jsonl(const Corpus& corpus, std::ostream& out);
// Atomic: writes a temp file and renames it. "-" writes to stdout.
void write_jsonl(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace forge
