#include "dickedim/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace dickedim {

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match the table header");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json provenance(const ModelParams& params, std::uint64_t seed) {
  return {
      {"params", {{"omega", params.omega}, {"omega0", params.omega0}, {"gamma", params.gamma}, {"j", params.j}}},
      {"seed", seed},
      {"version", version()},
  };
}

nlohmann::json to_json(const Estimate& e) { return {{"value", e.value}, {"stderr", e.error}}; }

namespace {

void emit(std::ostream& out, const Table& table, const nlohmann::json& meta) {
  out << "# " << meta.dump() << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

}  // namespace

void write_table(const std::filesystem::path& csv, const Table& table, const nlohmann::json& meta) {
  if (csv.empty()) {
    emit(std::cout, table, meta);
    return;
  }
  if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
  {
    std::ofstream out(csv);
    emit(out, table, meta);
    if (!out) throw std::runtime_error("cannot write " + csv.string());
  }
  std::ofstream side(csv.string() + ".json");
  side << meta.dump(2) << '\n';
  if (!side) throw std::runtime_error("cannot write " + csv.string() + ".json");
}

Table shell_table(const ShellSample& s) {
  Table t{{"q", "p", "Q", "P", "w"}, {}};
  t.rows.reserve(s.points.size());
  for (const auto& pt : s.points) t.rows.push_back({pt.x.q, pt.x.p, pt.x.Q, pt.x.P, pt.weight});
  return t;
}

Table weighted_histogram(const std::vector<double>& values, const std::vector<double>& weights, double lo, double hi,
                         std::size_t n_bins) {
  if (values.size() != weights.size()) throw std::invalid_argument("values and weights differ in length");
  if (!(hi > lo) || n_bins == 0) throw std::invalid_argument("bad histogram range");
  std::vector<double> mass(n_bins, 0.0);
  double total = 0.0;
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t i = 0; i < values.size(); ++i) {
    total += weights[i];
    if (values[i] < lo || values[i] >= hi) continue;
    mass[static_cast<std::size_t>((values[i] - lo) / width)] += weights[i];
  }
  Table t{{"bin_lo", "bin_hi", "density"}, {}};
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double a = lo + width * static_cast<double>(b);
    t.add({a, a + width, total > 0.0 ? mass[b] / (total * width) : 0.0});
  }
  return t;
}

}  // namespace dickedim
