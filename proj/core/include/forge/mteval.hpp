#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/report.hpp"

namespace forge {

enum class Smoothing { None, Epsilon };

Smoothing parse_smoothing(std::string_view name);

inline constexpr std::size_t kBleuMaxOrder = 4;

struct BleuResult {
  double score = 0.0;  // 0..100
  // Per-order precisions as used in the geometric mean (after smoothing).
  std::array<double, kBleuMaxOrder> precisions{};
  double brevity_penalty = 1.0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;
  std::array<std::size_t, kBleuMaxOrder> matches{};
  std::array<std::size_t, kBleuMaxOrder> totals{};
};

// Corpus BLEU-4 with a single reference per segment. Tokens are whitespace
// runs; no case folding. Epsilon smoothing replaces a zero precision with
// 1 / (2 * hypothesis n-gram count of that order); an order with no
// hypothesis n-grams at all has precision 0 either way. Brevity penalty is
// exp(1 - r/c) when c < r, and 0 when the hypotheses are empty.
// Throws DataError on empty input or a length mismatch.
BleuResult corpus_bleu(std::span<const std::string> hypotheses,
                       std::span<const std::string> references, Smoothing smoothing);

struct SystemOutputs {
  std::string system;
  std::vector<std::string> hypotheses;
};

struct EvalSet {
  std::string name;
  std::vector<std::string> sources;  // optional, may be empty
  std::vector<std::string> references;
  std::vector<SystemOutputs> systems;

  // Throws DataError on misaligned lists.
  void validate() const;
};

// Manifest JSON {name, refs_path, sources_path?, systems: {name: path}}.
// Paths resolve against the manifest's directory.
EvalSet load_eval_manifest(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);

struct SystemComparison {
  std::vector<std::string> systems;  // rows, first-appearance order
  std::vector<std::string> sets;     // columns
  // cells[row][col]; empty when the system has no output for that set.
  std::vector<std::vector<std::optional<BleuResult>>> cells;
  // Row index of the best score per column (first row on ties).
  std::vector<std::optional<std::size_t>> best;
};

SystemComparison compare_systems(std::span<const EvalSet> sets, Smoothing smoothing);

// Table: one row per system, one column per set, scores to 2 d.p., best per
// column marked with '*'. JSON: stable field order.
std::string render_comparison(const SystemComparison& cmp, ReportFormat format);

}  // namespace forge
