#include "spectrasort/spectra_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "spectrasort/error.hpp"
#include "spectrasort/preprocess.hpp"
#include "text_util.hpp"

namespace spectrasort {

using detail::chomp;
using detail::parse_double;
using detail::trim;

void WavelengthGrid::validate() const {
  if (!(start_nm < end_nm))
    throw Error(Errc::InvalidArgument, "grid start_nm must be < end_nm");
  if (n_points < 2) throw Error(Errc::InvalidArgument, "grid needs at least 2 points");
}

double WavelengthGrid::at(std::size_t i) const {
  if (i + 1 == n_points) return end_nm;
  return start_nm + static_cast<double>(i) * (end_nm - start_nm) / static_cast<double>(n_points - 1);
}

std::vector<double> WavelengthGrid::points() const {
  std::vector<double> p(n_points);
  for (std::size_t i = 0; i < n_points; ++i) p[i] = at(i);
  return p;
}

namespace {

constexpr std::string_view kUnicodeMinus = "\xE2\x88\x92";
constexpr double kIntensityTolerance = 1e-9;

bool starts_numeric(std::string_view line) {
  if (line.empty()) return false;
  const char c = line.front();
  if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.') return true;
  return line.starts_with(kUnicodeMinus);
}

std::optional<double> parse_field(std::string_view field) {
  field = trim(field);
  if (field.starts_with(kUnicodeMinus)) {
    std::string ascii = "-";
    ascii.append(field.substr(kUnicodeMinus.size()));
    return parse_double(ascii);
  }
  return parse_double(field);
}

std::optional<std::pair<double, double>> parse_row(std::string_view line, char sep) {
  auto fields = detail::split(line, sep);
  while (fields.size() > 2 && trim(fields.back()).empty()) fields.pop_back();
  if (fields.size() != 2) return std::nullopt;
  const auto w = parse_field(fields[0]);
  const auto v = parse_field(fields[1]);
  if (!w || !v) return std::nullopt;
  return std::make_pair(*w, *v);
}

}  // namespace

Spectrum parse_raw_spectrum(std::istream& text, const WavelengthGrid& grid, int sample_id) {
  grid.validate();
  Spectrum s;
  s.grid = grid;
  s.sample_id = sample_id;

  std::vector<std::pair<double, double>> rows;
  char sep = 0;
  std::string raw;
  for (std::size_t ordinal = 0; std::getline(text, raw); ++ordinal) {
    const std::string_view line = chomp(raw);
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    std::optional<std::pair<double, double>> row;
    if (starts_numeric(body)) {
      if (sep == 0) {
        for (char candidate : {';', ','}) {
          row = parse_row(body, candidate);
          if (row) {
            sep = candidate;
            break;
          }
        }
      } else {
        row = parse_row(body, sep);
      }
    }
    if (!row) {
      s.metadata.emplace(ordinal, std::string(line));
      continue;
    }
    const auto [w, v] = *row;
    if (v < -kIntensityTolerance || v > 1.0 + kIntensityTolerance)
      throw Error(Errc::IntensityOutOfRange,
                  "line " + std::to_string(ordinal + 1) + ": intensity " + std::string(body));
    if (!rows.empty() && !(w > rows.back().first))
      throw Error(Errc::NonMonotoneWavelengths,
                  "line " + std::to_string(ordinal + 1) + ": wavelength " + std::string(body));
    rows.emplace_back(w, std::clamp(v, 0.0, 1.0));
  }
  if (rows.size() < 2)
    throw Error(Errc::NoDataRows, std::to_string(rows.size()) + " data rows (need at least 2)");
  s.intensities = resample_to_grid(rows, grid);
  return s;
}

Spectrum parse_raw_spectrum_file(const std::string& path, const WavelengthGrid& grid,
                                 int sample_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  try {
    return parse_raw_spectrum(in, grid, sample_id);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + std::string(e.what()).substr(to_string(e.code()).size() + 2));
  }
}

std::vector<double> resample_to_grid(std::span<const std::pair<double, double>> points,
                                     const WavelengthGrid& grid) {
  grid.validate();
  if (points.size() < 2) throw Error(Errc::InvalidArgument, "resampling needs >= 2 points");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].first > points[i - 1].first))
      throw Error(Errc::InvalidArgument, "resampling needs strictly increasing wavelengths");

  std::vector<double> out(grid.n_points, 0.0);
  const double lo = points.front().first;
  const double hi = points.back().first;
  std::size_t j = 1;  // points[j-1].first <= x < points[j].first
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double x = grid.at(i);
    if (x < lo || x > hi) continue;
    while (j < points.size() && points[j].first <= x) ++j;
    const auto& [x0, y0] = points[j - 1];
    if (x == x0 || j == points.size()) {
      out[i] = y0;
      continue;
    }
    const auto& [x1, y1] = points[j];
    out[i] = y0 + (y1 - y0) * ((x - x0) / (x1 - x0));
  }
  return out;
}

std::string wavelength_column(double nm) { return "nm" + detail::format_fixed(nm, 3); }

double quantize_intensity(double v) { return *parse_double(detail::format_general(v, 9)); }

void write_dataset(const LabeledDataset& ds, std::ostream& out) {
  ds.validate();
  std::string line = "alloy_index,sample_id";
  for (std::size_t i = 0; i < ds.grid.n_points; ++i) {
    line += ',';
    line += wavelength_column(ds.grid.at(i));
  }
  line += '\n';
  out << line;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    line = std::to_string(ds.labels[r]);
    line += ',';
    line += std::to_string(ds.sample_ids[r]);
    for (Eigen::Index c = 0; c < ds.rows.cols(); ++c) {
      line += ',';
      line += detail::format_general(ds.rows(static_cast<Eigen::Index>(r), c), 9);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error(Errc::Io, "dataset write failed");
}

void write_dataset_file(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  write_dataset(ds, out);
}

LabeledDataset read_dataset(std::istream& in, std::vector<std::string> class_names,
                            const std::optional<WavelengthGrid>& expected_grid) {
  std::string raw;
  if (!std::getline(in, raw)) throw Error(Errc::SchemaMismatch, "missing header row");
  const auto header = detail::split(chomp(raw), ',');
  if (header.size() < 4 || header[0] != "alloy_index" || header[1] != "sample_id")
    throw Error(Errc::SchemaMismatch, "header must start with alloy_index,sample_id and name >= 2 wavelengths");
  const std::size_t d = header.size() - 2;

  WavelengthGrid grid;
  if (expected_grid) {
    grid = *expected_grid;
  } else {
    const auto nm = [](std::string_view col) {
      const auto v = col.starts_with("nm") ? parse_double(col.substr(2)) : std::nullopt;
      return v.value_or(std::numeric_limits<double>::quiet_NaN());
    };
    const double first = nm(header[2]);
    const double last = nm(header.back());
    if (!(first < last)) throw Error(Errc::SchemaMismatch, "unreadable wavelength columns");
    grid = WavelengthGrid{first, last, d};
  }
  if (grid.n_points != d)
    throw Error(Errc::SchemaMismatch, "header names " + std::to_string(d) +
                                          " wavelengths, grid has " + std::to_string(grid.n_points));
  for (std::size_t i = 0; i < d; ++i)
    if (header[i + 2] != wavelength_column(grid.at(i)))
      throw Error(Errc::SchemaMismatch, "column " + std::to_string(i + 3) + " is " +
                                            std::string(header[i + 2]) + ", expected " +
                                            wavelength_column(grid.at(i)));

  LabeledDataset ds = empty_dataset(grid, std::move(class_names));
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = chomp(raw);
    if (trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != d + 2)
      throw Error(Errc::SchemaMismatch, "line " + std::to_string(line_no) + " has " +
                                            std::to_string(fields.size()) + " fields, expected " +
                                            std::to_string(d + 2));
    const auto label = detail::parse_int(fields[0]);
    const auto sample = detail::parse_int(fields[1]);
    if (!label || !sample)
      throw Error(Errc::SchemaMismatch, "line " + std::to_string(line_no) + ": bad label or sample id");
    if (*label < 0 || static_cast<std::size_t>(*label) >= ds.class_names.size())
      throw Error(Errc::LabelOutOfRange, "line " + std::to_string(line_no) + ": label " +
                                             std::to_string(*label) + " with " +
                                             std::to_string(ds.class_names.size()) + " classes");
    for (std::size_t i = 0; i < d; ++i) {
      const auto v = parse_double(fields[i + 2]);
      if (!v) throw Error(Errc::SchemaMismatch, "line " + std::to_string(line_no) + ": bad number");
      if (*v < 0.0 || *v > 1.0)
        throw Error(Errc::IntensityOutOfRange, "line " + std::to_string(line_no));
      values.push_back(*v);
    }
    ds.labels.push_back(static_cast<int>(*label));
    ds.sample_ids.push_back(static_cast<int>(*sample));
  }
  ds.rows = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(ds.labels.size()),
                                     static_cast<Eigen::Index>(d));
  return ds;
}

LabeledDataset read_dataset_file(const std::string& path, std::vector<std::string> class_names,
                                 const std::optional<WavelengthGrid>& expected_grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  return read_dataset(in, std::move(class_names), expected_grid);
}

void write_class_names(const std::vector<std::string>& names, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  for (const auto& n : names) out << n << '\n';
}

std::optional<std::vector<std::string>> read_class_names(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::vector<std::string> names;
  std::string raw;
  while (std::getline(in, raw)) {
    const auto name = trim(raw);
    if (!name.empty()) names.emplace_back(name);
  }
  return names;
}

}  // namespace spectrasort
