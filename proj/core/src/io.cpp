#include "forge/io.hpp"

#include <glob.h>
#include <unistd.h>

#include <iostream>
#include <sstream>

#include "forge/error.hpp"
#include "forge/parallel.hpp"
#include "forge/version.hpp"

namespace forge {

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string_view version() { return FORGE_VERSION; }

}  // namespace forge

namespace forge::io {

namespace fs = std::filesystem;

StagedFile::StagedFile(fs::path target) : target_(std::move(target)) {
  if (target_ == "-") {
    to_stdout_ = true;
    return;
  }
  temp_ = target_;
  temp_ += ".tmp." + std::to_string(::getpid());
  file_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!file_) throw DataError("cannot open " + target_.string() + " for writing");
}

StagedFile::StagedFile(StagedFile&& other) noexcept
    : target_(std::move(other.target_)),
      temp_(std::move(other.temp_)),
      file_(std::move(other.file_)),
      to_stdout_(other.to_stdout_),
      done_(other.done_) {
  other.done_ = true;
}

StagedFile& StagedFile::operator=(StagedFile&& other) noexcept {
  if (this != &other) {
    discard();
    target_ = std::move(other.target_);
    temp_ = std::move(other.temp_);
    file_ = std::move(other.file_);
    to_stdout_ = other.to_stdout_;
    done_ = other.done_;
    other.done_ = true;
  }
  return *this;
}

StagedFile::~StagedFile() { discard(); }

std::ostream& StagedFile::stream() {
  if (to_stdout_) return std::cout;
  return file_;
}

void StagedFile::commit() {
  if (done_) return;
  done_ = true;
  if (to_stdout_) {
    std::cout.flush();
    return;
  }
  file_.flush();
  if (!file_) {
    std::error_code ignored;
    fs::remove(temp_, ignored);
    throw DataError("write failed: " + target_.string());
  }
  file_.close();
  std::error_code ec;
  fs::rename(temp_, target_, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(temp_, ignored);
    throw DataError("cannot move output into place: " + target_.string() + ": " + ec.message());
  }
}

void StagedFile::discard() noexcept {
  if (done_) return;
  done_ = true;
  if (to_stdout_) return;
  file_.close();
  std::error_code ignored;
  fs::remove(temp_, ignored);
}

void write_file_atomic(const fs::path& target, std::string_view content) {
  StagedFile out(target);
  out.stream().write(content.data(), static_cast<std::streamsize>(content.size()));
  out.commit();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<fs::path> expand_globs(const std::vector<std::string>& patterns) {
  std::vector<fs::path> out;
  for (const auto& pattern : patterns) {
    if (pattern.find_first_of("*?[") == std::string::npos) {
      out.emplace_back(pattern);
      continue;
    }
    ::glob_t matches{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &matches);
    if (rc == GLOB_NOMATCH) {
      ::globfree(&matches);
      throw ConfigError("no files match " + pattern);
    }
    if (rc != 0) {
      ::globfree(&matches);
      throw ConfigError("cannot expand " + pattern);
    }
    // glob(3) returns matches sorted.
    for (std::size_t i = 0; i < matches.gl_pathc; ++i) out.emplace_back(matches.gl_pathv[i]);
    ::globfree(&matches);
  }
  return out;
}

}  // namespace forge::io
