#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dickedim/classical.hpp"
#include "dickedim/model.hpp"

namespace dickedim {

/// Column-oriented numeric table written as CSV.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
};

/// Shortest round-trip decimal form (%.17g), so output is byte-stable for a given input.
std::string format_number(double v);

/// Parameters, seed and code version; callers add their own fields.
nlohmann::json provenance(const ModelParams& params, std::uint64_t seed);

nlohmann::json to_json(const Estimate& e);

/// Writes `csv` with a leading "# <metadata json>" line, and the same metadata as
/// `csv` + ".json". An empty path writes the CSV to stdout instead (no sidecar).
void write_table(const std::filesystem::path& csv, const Table& table, const nlohmann::json& meta);

/// One row per shell point: q, p, Q, P, w.
Table shell_table(const ShellSample& s);

/// Weighted histogram of `values` on n_bins equal bins spanning [lo, hi]; columns
/// bin_lo, bin_hi, density (normalized to unit area).
Table weighted_histogram(const std::vector<double>& values, const std::vector<double>& weights, double lo, double hi,
                         std::size_t n_bins);

}  // namespace dickedim
