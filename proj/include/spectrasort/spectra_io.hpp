#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spectrasort/types.hpp"

namespace spectrasort {

/// Evenly spaced wavelength axis in nm. Defaults match the 350-700 nm
/// spectrometer band with a 3648-pixel detector.
struct WavelengthGrid {
  double start_nm = 350.0;
  double end_nm = 700.0;
  std::size_t n_points = 3648;

  /// Throws InvalidArgument unless start < end and n_points >= 2.
  void validate() const;
  double at(std::size_t i) const;
  std::vector<double> points() const;

  friend bool operator==(const WavelengthGrid&, const WavelengthGrid&) = default;
};

/// One acquisition resampled onto a grid.
struct Spectrum {
  WavelengthGrid grid;
  std::vector<double> intensities;
  int sample_id = 0;
  // Non-data lines of the source file, keyed by 0-based line number.
  std::map<std::size_t, std::string> metadata;
};

/// Parse a raw spectrometer export.
///
/// A line whose first non-blank character is not a digit, '+', '-' (or the
/// Unicode minus) or '.' is metadata. Candidate lines must split into exactly
/// two numeric fields on the separator (';' or ',', fixed by the first
/// candidate line that parses); candidate lines that do not are kept as
/// metadata too, so header and footer content never aborts a parse.
/// Decimal separator is '.' only.
///
/// Errors: NoDataRows (fewer than two data rows), NonMonotoneWavelengths,
/// IntensityOutOfRange (outside [0,1] by more than 1e-9).
Spectrum parse_raw_spectrum(std::istream& text, const WavelengthGrid& grid, int sample_id);
Spectrum parse_raw_spectrum_file(const std::string& path, const WavelengthGrid& grid,
                                 int sample_id);

/// Linear interpolation of (wavelength, intensity) knots onto the grid.
/// Grid points outside the knot span map to 0.0. Knots must be strictly
/// increasing and at least two (InvalidArgument otherwise).
std::vector<double> resample_to_grid(std::span<const std::pair<double, double>> points,
                                     const WavelengthGrid& grid);

struct LabeledDataset;

/// Merged dataset CSV: header `alloy_index,sample_id,nm350.000,...`
/// (wavelengths with 3 decimals), one row per spectrum, intensities with 9
/// significant digits, LF line endings.
void write_dataset(const LabeledDataset& ds, std::ostream& out);
void write_dataset_file(const LabeledDataset& ds, const std::string& path);

/// Read a dataset CSV. The grid is recovered from the header and must match
/// `expected_grid` when given (SchemaMismatch). Labels must index
/// `class_names` (LabelOutOfRange).
LabeledDataset read_dataset(std::istream& in, std::vector<std::string> class_names,
                            const std::optional<WavelengthGrid>& expected_grid = std::nullopt);
LabeledDataset read_dataset_file(const std::string& path, std::vector<std::string> class_names,
                                 const std::optional<WavelengthGrid>& expected_grid = std::nullopt);

/// Column name for a grid point, e.g. "nm350.000".
std::string wavelength_column(double nm);

/// Round to the 9 significant digits the dataset file carries.
double quantize_intensity(double v);

/// Class-name sidecar ("<dataset>.classes", one name per line) used by the
/// CLI so a dataset file keeps its alloy names across commands.
void write_class_names(const std::vector<std::string>& names, const std::string& path);
std::optional<std::vector<std::string>> read_class_names(const std::string& path);

}  // namespace spectrasort
