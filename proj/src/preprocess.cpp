#include "spectrasort/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "spectrasort/error.hpp"
#include "spectrasort/rng.hpp"
#include "text_util.hpp"

namespace spectrasort {

const std::vector<std::string>& default_alloy_names() {
  static const std::vector<std::string> names = {"M1",  "M2", "T1", "P9",  "M35", "M36",
                                                 "M42", "T4", "T42", "D2", "H10", "H13"};
  return names;
}

void GateConfig::validate() const {
  if (!(0.0 < low_all_threshold && low_all_threshold < peak_threshold &&
        peak_threshold < saturation_value))
    throw Error(Errc::InvalidArgument,
                "gate thresholds must satisfy 0 < low_all < peak < saturation");
  if (saturation_tolerance < 0.0)
    throw Error(Errc::InvalidArgument, "saturation_tolerance must be >= 0");
}

std::string_view to_string(GateReason r) {
  switch (r) {
    case GateReason::Accepted: return "Accepted";
    case GateReason::LowSignal: return "LowSignal";
    case GateReason::NoPeak: return "NoPeak";
    case GateReason::Saturated: return "Saturated";
  }
  return "Unknown";
}

GateVerdict quality_gate(std::span<const double> intensities, const GateConfig& cfg) {
  const double saturation = cfg.saturation_value - cfg.saturation_tolerance;
  bool all_low = true;
  bool has_peak = false;
  for (double v : intensities) {
    if (v >= saturation) return {false, GateReason::Saturated};
    all_low = all_low && v < cfg.low_all_threshold;
    has_peak = has_peak || v > cfg.peak_threshold;
  }
  if (all_low) return {false, GateReason::LowSignal};
  if (!has_peak) return {false, GateReason::NoPeak};
  return {true, GateReason::Accepted};
}

GateVerdict quality_gate(const Spectrum& s, const GateConfig& cfg) {
  return quality_gate(std::span<const double>(s.intensities), cfg);
}

GateReport::GateReport() {
  for (auto r : {GateReason::Accepted, GateReason::LowSignal, GateReason::NoPeak,
                 GateReason::Saturated})
    counts[r] = 0;
}

void GateReport::merge(const GateReport& other) {
  for (const auto& [r, n] : other.counts) counts[r] += n;
}

std::size_t GateReport::total() const {
  std::size_t n = 0;
  for (const auto& [r, c] : counts) n += c;
  return n;
}

double GateReport::accept_rate() const {
  const auto n = total();
  return n == 0 ? 0.0 : static_cast<double>(counts.at(GateReason::Accepted)) / static_cast<double>(n);
}

void LabeledDataset::validate() const {
  const auto n = labels.size();
  if (sample_ids.size() != n || static_cast<std::size_t>(rows.rows()) != n)
    throw Error(Errc::InvalidArgument, "labels, sample ids and rows disagree in length");
  if (static_cast<std::size_t>(rows.cols()) != grid.n_points)
    throw Error(Errc::DimensionMismatch, "row width differs from grid size");
  for (int l : labels)
    if (l < 0 || static_cast<std::size_t>(l) >= class_names.size())
      throw Error(Errc::LabelOutOfRange, "label " + std::to_string(l));
  if (n > 0 && (rows.minCoeff() < 0.0 || rows.maxCoeff() > 1.0))
    throw Error(Errc::IntensityOutOfRange, "dataset intensities must lie in [0,1]");
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out = empty_dataset(grid, class_names);
  out.rows.resize(static_cast<Eigen::Index>(indices.size()), rows.cols());
  out.labels.reserve(indices.size());
  out.sample_ids.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto i = indices[r];
    out.rows.row(static_cast<Eigen::Index>(r)) = rows.row(static_cast<Eigen::Index>(i));
    out.labels.push_back(labels[i]);
    out.sample_ids.push_back(sample_ids[i]);
  }
  return out;
}

std::vector<int> LabeledDataset::distinct_sample_ids() const {
  std::vector<int> ids = sample_ids;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

LabeledDataset empty_dataset(const WavelengthGrid& grid, std::vector<std::string> class_names) {
  LabeledDataset ds;
  ds.grid = grid;
  ds.rows.resize(0, static_cast<Eigen::Index>(grid.n_points));
  ds.class_names = std::move(class_names);
  return ds;
}

AlloyTaxonomy AlloyTaxonomy::default_taxonomy() {
  AlloyTaxonomy t;
  t.cluster_names = {"HSS_without_Co", "HSS_with_Co", "CrMoV"};
  for (const char* a : {"M1", "M2", "T1", "P9"}) t.cluster_of[a] = 0;
  for (const char* a : {"M35", "M36", "M42", "T4", "T42"}) t.cluster_of[a] = 1;
  for (const char* a : {"D2", "H10", "H13"}) t.cluster_of[a] = 2;
  return t;
}

AlloyTaxonomy AlloyTaxonomy::parse(std::istream& in) {
  AlloyTaxonomy t;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string content = raw.substr(0, raw.find('#'));
    const auto line = detail::trim(content);
    if (line.empty()) continue;
    std::istringstream fields{std::string(line)};
    std::string alloy, cluster, extra;
    if (!(fields >> alloy >> cluster) || (fields >> extra))
      throw Error(Errc::InvalidArgument, "taxonomy line " + std::to_string(line_no) +
                                             ": expected '<alloy> <cluster>'");
    auto it = std::find(t.cluster_names.begin(), t.cluster_names.end(), cluster);
    const auto id = static_cast<std::size_t>(it - t.cluster_names.begin());
    if (it == t.cluster_names.end()) t.cluster_names.push_back(cluster);
    t.cluster_of[alloy] = id;
  }
  return t;
}

AlloyTaxonomy AlloyTaxonomy::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  return parse(in);
}

std::pair<LabeledDataset, GateReport> assemble(std::span<const Spectrum> spectra, int alloy_index,
                                               std::vector<std::string> class_names,
                                               const GateConfig& cfg) {
  const WavelengthGrid grid = spectra.empty() ? WavelengthGrid{} : spectra.front().grid;
  return assemble(spectra, alloy_index, std::move(class_names), grid, cfg);
}

std::pair<LabeledDataset, GateReport> assemble(std::span<const Spectrum> spectra, int alloy_index,
                                               std::vector<std::string> class_names,
                                               const WavelengthGrid& grid, const GateConfig& cfg) {
  cfg.validate();
  if (alloy_index < 0 || static_cast<std::size_t>(alloy_index) >= class_names.size())
    throw Error(Errc::LabelOutOfRange, "alloy index " + std::to_string(alloy_index));
  for (const auto& s : spectra)
    if (!(s.grid == grid) || s.intensities.size() != grid.n_points)
      throw Error(Errc::MixedGrids, "spectrum of sample " + std::to_string(s.sample_id) +
                                        " is on a different grid");

  GateReport report;
  std::vector<std::size_t> accepted;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const auto verdict = quality_gate(spectra[i], cfg);
    report.add(verdict.reason);
    if (verdict.accepted) accepted.push_back(i);
  }

  LabeledDataset ds = empty_dataset(grid, std::move(class_names));
  ds.rows.resize(static_cast<Eigen::Index>(accepted.size()), static_cast<Eigen::Index>(grid.n_points));
  for (std::size_t r = 0; r < accepted.size(); ++r) {
    const auto& s = spectra[accepted[r]];
    for (std::size_t c = 0; c < grid.n_points; ++c)
      ds.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          quantize_intensity(s.intensities[c]);
    ds.labels.push_back(alloy_index);
    ds.sample_ids.push_back(s.sample_id);
  }
  return {std::move(ds), report};
}

LabeledDataset merge(std::span<const LabeledDataset> datasets) {
  if (datasets.empty()) throw Error(Errc::EmptyDataset, "nothing to merge");
  const auto& first = datasets.front();
  std::size_t total = 0;
  for (const auto& ds : datasets) {
    if (!(ds.grid == first.grid)) throw Error(Errc::MixedGrids, "datasets use different grids");
    if (ds.class_names != first.class_names)
      throw Error(Errc::ClassNameMismatch, "datasets use different class names");
    total += ds.size();
  }
  LabeledDataset out = empty_dataset(first.grid, first.class_names);
  out.rows.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(first.grid.n_points));
  out.labels.reserve(total);
  out.sample_ids.reserve(total);
  Eigen::Index at = 0;
  for (const auto& ds : datasets) {
    out.rows.middleRows(at, ds.rows.rows()) = ds.rows;
    at += ds.rows.rows();
    out.labels.insert(out.labels.end(), ds.labels.begin(), ds.labels.end());
    out.sample_ids.insert(out.sample_ids.end(), ds.sample_ids.begin(), ds.sample_ids.end());
  }
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split_by_sample(const LabeledDataset& ds,
                                                          const std::set<int>& test_sample_ids) {
  const auto present = ds.distinct_sample_ids();
  for (int id : test_sample_ids)
    if (!std::binary_search(present.begin(), present.end(), id))
      throw Error(Errc::UnknownSampleId, "sample " + std::to_string(id) + " not in dataset");
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < ds.size(); ++i)
    (test_sample_ids.contains(ds.sample_ids[i]) ? test_idx : train_idx).push_back(i);
  return {ds.subset(train_idx), ds.subset(test_idx)};
}

std::vector<std::size_t> subsample_indices(const LabeledDataset& ds, std::size_t n_per_class,
                                           std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(ds.n_classes());
  for (std::size_t i = 0; i < ds.size(); ++i)
    by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);

  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    if (rows.empty()) continue;
    if (rows.size() < n_per_class)
      throw Error(Errc::InsufficientRows, "class " + ds.class_names[c] + " has " +
                                              std::to_string(rows.size()) + " rows, " +
                                              std::to_string(n_per_class) + " requested");
    std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      return ds.sample_ids[a] < ds.sample_ids[b];
    });
    RngStream rng(seed, "subsample", {c});
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
      std::swap(rows[i], rows[i + rng.below(rows.size() - i)]);
    out.insert(out.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_per_class));
  }
  return out;
}

LabeledDataset subsample_per_class(const LabeledDataset& ds, std::size_t n_per_class,
                                   std::uint64_t seed) {
  const auto idx = subsample_indices(ds, n_per_class, seed);
  return ds.subset(idx);
}

std::set<int> last_sample_per_class(const LabeledDataset& ds) {
  std::map<int, int> last;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto [it, inserted] = last.emplace(ds.labels[i], ds.sample_ids[i]);
    if (!inserted) it->second = std::max(it->second, ds.sample_ids[i]);
  }
  std::set<int> out;
  for (const auto& [label, id] : last) out.insert(id);
  return out;
}

}  // namespace spectrasort
