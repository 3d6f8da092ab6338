#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace forge::io {

// Output file written to a sibling temp path and renamed into place on
// commit(). Dropping an uncommitted StagedFile deletes the temp file, so a
// failed run leaves no partial output behind. The path "-" streams to stdout.
class StagedFile {
 public:
  explicit StagedFile(std::filesystem::path target);
  StagedFile(const StagedFile&) = delete;
  StagedFile& operator=(const StagedFile&) = delete;
  StagedFile(StagedFile&& other) noexcept;
  StagedFile& operator=(StagedFile&& other) noexcept;
  ~StagedFile();

  std::ostream& stream();
  void commit();
  const std::filesystem::path& target() const { return target_; }

 private:
  void discard() noexcept;

  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream file_;
  bool to_stdout_ = false;
  bool done_ = false;
};

void write_file_atomic(const std::filesystem::path& target, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Expands shell-style wildcards in each pattern. Patterns without wildcards
// pass through unchanged; a wildcard pattern with no match is an error.
std::vector<std::filesystem::path> expand_globs(const std::vector<std::string>& patterns);

}  // namespace forge::io
