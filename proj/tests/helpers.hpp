#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectrasort/preprocess.hpp"
#include "spectrasort/types.hpp"

namespace testing {

// Test-side randomness uses <random> directly so oracles never share code
// with the library's own streams.
inline spectrasort::Matrix random_matrix(std::mt19937_64& g, int rows, int cols, double lo = 0.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  spectrasort::Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = u(g);
  return m;
}

// Small labelled dataset: class c has its mass around column c, plus noise.
inline spectrasort::LabeledDataset blob_dataset(std::mt19937_64& g, int n_classes, int per_class,
                                                int dims, double spread = 0.15,
                                                int samples_per_class = 1) {
  spectrasort::WavelengthGrid grid{400.0, 400.0 + dims - 1, static_cast<std::size_t>(dims)};
  std::vector<std::string> names;
  for (int c = 0; c < n_classes; ++c) names.push_back("A" + std::to_string(c));
  auto ds = spectrasort::empty_dataset(grid, names);
  ds.rows.resize(n_classes * per_class, dims);
  std::normal_distribution<double> noise(0.0, spread);
  int r = 0;
  for (int c = 0; c < n_classes; ++c)
    for (int i = 0; i < per_class; ++i, ++r) {
      for (int d = 0; d < dims; ++d) {
        const double centre = 0.3 + 0.4 * ((d % n_classes) == c);
        ds.rows(r, d) = std::clamp(centre + noise(g), 0.0, 1.0);
      }
      ds.labels.push_back(c);
      ds.sample_ids.push_back(100 + c * samples_per_class + (i * samples_per_class) / per_class);
    }
  return ds;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("spectrasort_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace testing

namespace testing {

// Reference confusion counts: class names plus a square matrix.
struct CountTable {
  std::vector<std::string> names;
  std::vector<std::vector<long>> counts;
};

inline CountTable read_count_table(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  CountTable t;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    if (header) {
      t.names.assign(cells.begin() + 1, cells.end());
      header = false;
      continue;
    }
    std::vector<long> row;
    for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(std::stol(cells[i]));
    t.counts.push_back(row);
  }
  return t;
}

}  // namespace testing
