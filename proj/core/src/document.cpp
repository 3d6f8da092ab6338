#include "forge/document.hpp"

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "forge/error.hpp"
#include "forge/io.hpp"
#include "forge/unicode.hpp"

namespace forge {

using ordered_json = nlohmann::ordered_json;

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto c = static_cast<unsigned char>(text[pos]);
    bool space = false;
    if (c < 0x80) {
      space = c == ' ' || (c >= 0x09 && c <= 0x0D);
      ++pos;
    } else {
      space = unicode::is_whitespace(unicode::detail::next(text, pos));
    }
    if (space) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

Document Document::make(std::string id, std::string source, std::string text, Meta meta,
                        const TokenCounter& counter) {
  Document doc{std::move(id), std::move(source), std::move(text), std::move(meta), 0};
  doc.token_count = counter(doc.text);
  return doc;
}

Document Document::with_text(std::string new_text, const TokenCounter& counter) const {
  Document doc{id, source, std::move(new_text), meta, 0};
  doc.token_count = counter(doc.text);
  return doc;
}

Corpus::Corpus(std::vector<Document> docs) {
  docs_.reserve(docs.size());
  for (auto& doc : docs) push_back(std::move(doc));
}

void Corpus::push_back(Document doc) {
  if (doc.id.empty()) throw DataError("document with empty id");
  if (ids_.contains(doc.id)) throw DataError("duplicate document id \"" + doc.id + "\"");
  ids_.emplace(doc.id, docs_.size());
  auto [it, inserted] = source_index_.try_emplace(doc.source, manifest_.size());
  if (inserted) manifest_.push_back(SourceCount{doc.source, 0, 0});
  auto& entry = manifest_[it->second];
  entry.documents += 1;
  entry.tokens += doc.token_count;
  total_tokens_ += doc.token_count;
  docs_.push_back(std::move(doc));
}

bool Corpus::contains(std::string_view id) const { return ids_.contains(std::string(id)); }

namespace {

std::string location(std::string_view origin, std::size_t line) {
  return std::string(origin) + ":" + std::to_string(line);
}

std::string required_string(const ordered_json& obj, const char* key, bool required,
                            const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw DataError(where + ": missing \"" + key + "\" field");
    return {};
  }
  if (!it->is_string()) throw DataError(where + ": \"" + key + "\" must be a string");
  return it->get<std::string>();
}

// Reads records from `in`, appending to `corpus`; `seen` maps ids to their
// first location across calls.
void read_into(Corpus& corpus, std::istream& in, std::string_view origin,
               const std::string& default_source, const TokenCounter& counter,
               std::unordered_map<std::string, std::string>& seen) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    std::string_view view(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (unicode::trim(view).empty()) continue;

    const std::string where = location(origin, line_no);
    ordered_json record;
    try {
      record = ordered_json::parse(view);
    } catch (const ordered_json::parse_error& e) {
      const std::size_t bom = line.size() - view.size() - (line.ends_with('\r') ? 1 : 0);
      const std::size_t at = line_start + bom + (e.byte > 0 ? e.byte - 1 : 0);
      throw DataError(where + ": byte offset " + std::to_string(at) + ": malformed JSON: " +
                      e.what());
    }
    if (!record.is_object()) throw DataError(where + ": expected a JSON object");

    std::string id = required_string(record, "id", true, where);
    if (id.empty()) throw DataError(where + ": empty \"id\"");
    std::string text = required_string(record, "text", true, where);
    std::string source = required_string(record, "source", false, where);
    if (!record.contains("source")) source = default_source;

    Meta meta;
    if (const auto it = record.find("meta"); it != record.end() && !it->is_null()) {
      if (!it->is_object()) throw DataError(where + ": \"meta\" must be an object");
      for (const auto& [key, value] : it->items()) {
        if (!value.is_string()) {
          throw DataError(where + ": meta value \"" + key + "\" must be a string");
        }
        meta.emplace(key, value.get<std::string>());
      }
    }

    if (auto [it, inserted] = seen.try_emplace(id, where); !inserted) {
      throw DataError(where + ": duplicate id \"" + id + "\" (first seen at " + it->second + ")");
    }
    corpus.push_back(
        Document::make(std::move(id), std::move(source), std::move(text), std::move(meta), counter));
  }
  if (in.bad()) throw DataError(std::string(origin) + ": read error");
}

std::string default_source_for(const std::filesystem::path& path, const ReadOptions& options) {
  if (!options.default_source.empty()) return options.default_source;
  return path.stem().string();
}

}  // namespace

Corpus read_jsonl(std::istream& in, std::string_view origin, const ReadOptions& options) {
  Corpus corpus;
  std::unordered_map<std::string, std::string> seen;
  const std::string source =
      options.default_source.empty() ? std::filesystem::path(origin).stem().string()
                                     : options.default_source;
  read_into(corpus, in, origin, source, options.counter, seen);
  return corpus;
}

Corpus read_jsonl(const std::filesystem::path& path, const ReadOptions& options) {
  return read_jsonl_files({path}, options);
}

Corpus read_jsonl_files(const std::vector<std::filesystem::path>& paths,
                        const ReadOptions& options) {
  Corpus corpus;
  std::unordered_map<std::string, std::string> seen;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    read_into(corpus, in, path.string(), default_source_for(path, options), options.counter, seen);
  }
  return corpus;
}

std::string to_jsonl_line(const Document& doc) {
  ordered_json record;
  record["id"] = doc.id;
  record["source"] = doc.source;
  record["text"] = doc.text;
  ordered_json meta = ordered_json::object();
  for (const auto& [key, value] : doc.meta) meta[key] = value;
  record["meta"] = std::move(meta);
  record["token_count"] = doc.token_count;
  return record.dump();
}

void write_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus) {
    out << to_jsonl_line(doc) << '\n';
  }
}

void write_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  io::StagedFile file(path);
  write_jsonl(corpus, file.stream());
  file.commit();
}

}  // namespace forge
