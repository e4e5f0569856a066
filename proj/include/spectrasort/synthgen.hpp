#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spectrasort/preprocess.hpp"
#include "spectrasort/rng.hpp"
#include "spectrasort/spectra_io.hpp"

namespace spectrasort {

struct EmissionLine {
  double center_nm = 0.0;
  double strength = 1.0;  // (0, 1]
};

/// Synthetic emission lines per element symbol.
struct ElementLineCatalog {
  std::map<std::string, std::vector<EmissionLine>> lines;

  /// Every center inside the grid span, every strength in (0, 1].
  void validate(const WavelengthGrid& grid) const;

  /// Text form: "<element> <center_nm> <strength>" per line, '#' comments.
  static ElementLineCatalog parse(std::istream& in);
  static ElementLineCatalog load(const std::string& path);
  void write(std::ostream& out) const;
};

struct AlloyComposition {
  std::string name;
  std::map<std::string, double> fractions;  // weight fractions

  /// Fractions in [0,1] summing to at most 1.
  void validate() const;
};

/// Text form: "<alloy> <element>=<fraction> ..." per line, '#' comments.
std::vector<AlloyComposition> parse_compositions(std::istream& in);
std::vector<AlloyComposition> load_compositions(const std::string& path);
void write_compositions(const std::vector<AlloyComposition>& alloys, std::ostream& out);

/// Built-in presets: ten synthetic elements and one composition per alloy of
/// default_alloy_names(). The numbers are stand-ins engineered for
/// within-cluster similarity, not metallurgical data.
ElementLineCatalog default_catalog();
std::vector<AlloyComposition> default_compositions();

struct SynthConfig {
  double line_sigma_nm = 0.8;
  double baseline = 0.02;
  double noise_std = 0.01;
  double sample_jitter_rel = 0.10;
  double offspec_jitter_rel = 0.35;
  double arc_jitter_rel = 0.20;  // per-spectrum gain ~ U[1-a, 1+a]
  // Unset: calibrated so the brightest clean preset peak is 0.7 at unit gain.
  std::optional<double> peak_scale;
  std::uint64_t seed = 20190601;

  void validate() const;

  /// Text form: "key = value" lines with the field names above.
  static SynthConfig parse(std::istream& in);
  static SynthConfig load(const std::string& path);
};

/// peak_scale that puts the largest clean line sum over `alloys` at
/// target - baseline, so the brightest clean peak reads `target`.
double calibrate_peak_scale(std::span<const AlloyComposition> alloys,
                            const ElementLineCatalog& cat, const SynthConfig& cfg,
                            const WavelengthGrid& grid, double target = 0.7);

/// Line profile of one element on the grid: sum over its lines of
/// strength * exp(-(x - center)^2 / (2 sigma^2)).
std::vector<double> element_profile(const std::vector<EmissionLine>& lines, double sigma_nm,
                                    const WavelengthGrid& grid);

/// Noise-free, unclamped signal: baseline + gain * peak_scale *
/// sum_e fraction_e * profile_e. Errors: UnknownElement.
std::vector<double> clean_signal(const AlloyComposition& comp, const ElementLineCatalog& cat,
                                 const SynthConfig& cfg, const WavelengthGrid& grid,
                                 double peak_scale, double gain = 1.0);

/// One spectrum: a gain drawn from U[1-arc, 1+arc], additive N(0, noise_std)
/// per pixel, clamped to [0,1]. peak_scale must be set in cfg.
/// Errors: UnknownElement, InvalidArgument.
Spectrum synth_spectrum(const AlloyComposition& comp, const ElementLineCatalog& cat,
                        const SynthConfig& cfg, const WavelengthGrid& grid, RngStream& rng);

/// Draw one jittered composition (each fraction times U[1-j, 1+j]) and emit
/// n_spectra spectra from it, all tagged sample_id.
std::vector<Spectrum> synth_physical_sample(const AlloyComposition& comp,
                                            const ElementLineCatalog& cat, const SynthConfig& cfg,
                                            const WavelengthGrid& grid, int sample_id,
                                            std::size_t n_spectra, RngStream& rng,
                                            bool offspec = false);

struct SynthLayout {
  std::size_t samples_per_alloy = 3;
  std::size_t spectra_per_sample = 200;
  int first_sample_id = 101;
  bool offspec = false;  // every sample uses offspec_jitter_rel
};

/// Alloy a, sample j gets id first_sample_id + a*samples_per_alloy + j and
/// the stream ("synth-sample", sample id) of cfg.seed. Spectra pass the
/// default quality gate before entering the dataset.
LabeledDataset synth_dataset(std::span<const AlloyComposition> alloys,
                             const ElementLineCatalog& cat, const SynthConfig& cfg,
                             const WavelengthGrid& grid, const SynthLayout& layout,
                             GateReport* gate_report = nullptr);

}  // namespace spectrasort
