#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spectrasort/spectra_io.hpp"
#include "spectrasort/types.hpp"

namespace spectrasort {

/// The twelve reference tool and high-speed steels, in label order.
const std::vector<std::string>& default_alloy_names();

// ---------------------------------------------------------------------------
// Quality gate
// ---------------------------------------------------------------------------

struct GateConfig {
  double low_all_threshold = 0.1;
  double peak_threshold = 0.2;
  double saturation_value = 1.0;
  double saturation_tolerance = 1e-9;

  /// Requires 0 < low_all_threshold < peak_threshold < saturation_value.
  void validate() const;
};

enum class GateReason { Accepted, LowSignal, NoPeak, Saturated };

std::string_view to_string(GateReason r);

struct GateVerdict {
  bool accepted = false;
  GateReason reason = GateReason::Accepted;
};

/// Saturated if any intensity >= saturation_value - tolerance; else LowSignal
/// if every intensity < low_all_threshold; else NoPeak if none exceeds
/// peak_threshold; else Accepted.
GateVerdict quality_gate(std::span<const double> intensities, const GateConfig& cfg = {});
GateVerdict quality_gate(const Spectrum& s, const GateConfig& cfg = {});

struct GateReport {
  std::map<GateReason, std::size_t> counts;  // every reason present, zero or not

  GateReport();
  void add(GateReason r) { ++counts[r]; }
  void merge(const GateReport& other);
  std::size_t total() const;
  std::size_t rejected() const { return total() - counts.at(GateReason::Accepted); }
  double accept_rate() const;  // 0 when empty
};

// ---------------------------------------------------------------------------
// Labeled datasets
// ---------------------------------------------------------------------------

/// Dense spectra on one grid with alloy-index labels and physical-sample ids.
struct LabeledDataset {
  WavelengthGrid grid;
  Matrix rows;  // n x grid.n_points
  std::vector<int> labels;
  std::vector<int> sample_ids;
  std::vector<std::string> class_names;

  std::size_t size() const { return labels.size(); }
  std::size_t n_classes() const { return class_names.size(); }

  /// Checks shapes, label range and [0,1] intensities.
  void validate() const;

  /// Rows selected by index, in the given order.
  LabeledDataset subset(std::span<const std::size_t> indices) const;

  /// Distinct sample ids in ascending order.
  std::vector<int> distinct_sample_ids() const;
  std::vector<std::size_t> class_counts() const;
};

LabeledDataset empty_dataset(const WavelengthGrid& grid, std::vector<std::string> class_names);

/// Cluster grouping of alloys (rows/columns of the collapsed confusion matrix).
struct AlloyTaxonomy {
  std::vector<std::string> cluster_names;
  std::map<std::string, std::size_t> cluster_of;

  /// HSS_without_Co = {M1,M2,T1,P9}, HSS_with_Co = {M35,M36,M42,T4,T42},
  /// CrMoV = {D2,H10,H13}.
  static AlloyTaxonomy default_taxonomy();

  /// Text form: one "<alloy> <cluster>" pair per line, '#' comments.
  /// Cluster order is first appearance.
  static AlloyTaxonomy parse(std::istream& in);
  static AlloyTaxonomy load(const std::string& path);
};

/// Gate each spectrum and label the accepted ones with alloy_index.
/// Accepted intensities are quantized to the dataset file precision.
/// Errors: MixedGrids, LabelOutOfRange.
std::pair<LabeledDataset, GateReport> assemble(std::span<const Spectrum> spectra, int alloy_index,
                                               std::vector<std::string> class_names,
                                               const GateConfig& cfg = {});
/// As above, with the grid given explicitly so an empty input still yields
/// a dataset on a known grid.
std::pair<LabeledDataset, GateReport> assemble(std::span<const Spectrum> spectra, int alloy_index,
                                               std::vector<std::string> class_names,
                                               const WavelengthGrid& grid,
                                               const GateConfig& cfg = {});

/// Row concatenation. Errors: MixedGrids, ClassNameMismatch, EmptyDataset
/// (no inputs).
LabeledDataset merge(std::span<const LabeledDataset> datasets);

/// Rows whose sample id is in test_sample_ids go to the second dataset.
/// Errors: UnknownSampleId.
std::pair<LabeledDataset, LabeledDataset> split_by_sample(const LabeledDataset& ds,
                                                          const std::set<int>& test_sample_ids);

/// Row indices of a seeded per-class draw without replacement.
///
/// Each present class's rows are ordered by (sample_id, row index) and then
/// shuffled with the "subsample" stream of that class; the first n rows are
/// taken. Selections for n < n' are prefixes of each other.
/// Errors: InsufficientRows naming the short class.
std::vector<std::size_t> subsample_indices(const LabeledDataset& ds, std::size_t n_per_class,
                                           std::uint64_t seed);
LabeledDataset subsample_per_class(const LabeledDataset& ds, std::size_t n_per_class,
                                   std::uint64_t seed);

/// For each class, the sample with the largest id (the "third sample" held
/// out in a sample-aware split).
std::set<int> last_sample_per_class(const LabeledDataset& ds);

}  // namespace spectrasort
