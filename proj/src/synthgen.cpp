#include "spectrasort/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spectrasort/error.hpp"
#include "text_util.hpp"

namespace spectrasort {

namespace {

std::ifstream open_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
  return in;
}

/// Lines with comments and surrounding blanks removed; empty lines skipped.
template <class Fn>
void for_each_content_line(std::istream& in, Fn&& fn) {
  std::string raw;
  std::size_t no = 0;
  while (std::getline(in, raw)) {
    ++no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (!line.empty()) fn(line, no);
  }
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    const auto end = s.find_first_of(" \t", start);
    out.push_back(s.substr(start, end == std::string_view::npos ? s.size() - start : end - start));
    pos = end == std::string_view::npos ? s.size() : end;
  }
  return out;
}

double number(std::string_view s, std::size_t line_no) {
  const auto v = detail::parse_double(s);
  if (!v)
    throw Error(Errc::InvalidArgument,
                "line " + std::to_string(line_no) + ": '" + std::string(s) + "' is not a number");
  return *v;
}

/// peak_scale * sum_e fraction_e * profile_e, before gain and baseline.
std::vector<double> line_signal(const AlloyComposition& comp, const ElementLineCatalog& cat,
                                double sigma_nm, const WavelengthGrid& grid, double peak_scale) {
  std::vector<double> sum(grid.n_points, 0.0);
  for (const auto& [element, fraction] : comp.fractions) {
    const auto it = cat.lines.find(element);
    if (it == cat.lines.end())
      throw Error(Errc::UnknownElement,
                  "alloy '" + comp.name + "' uses element '" + element + "' missing from the catalog");
    const auto profile = element_profile(it->second, sigma_nm, grid);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += fraction * profile[i];
  }
  for (auto& v : sum) v *= peak_scale;
  return sum;
}

Spectrum emit(const std::vector<double>& lines, const SynthConfig& cfg, const WavelengthGrid& grid,
              RngStream& rng) {
  Spectrum s;
  s.grid = grid;
  const double gain = rng.uniform(1.0 - cfg.arc_jitter_rel, 1.0 + cfg.arc_jitter_rel);
  s.intensities.resize(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double v = cfg.baseline + gain * lines[i] + cfg.noise_std * rng.normal();
    s.intensities[i] = std::clamp(v, 0.0, 1.0);
  }
  return s;
}

double required_peak_scale(const SynthConfig& cfg) {
  if (!cfg.peak_scale)
    throw Error(Errc::InvalidArgument, "peak_scale must be set (see calibrate_peak_scale)");
  return *cfg.peak_scale;
}

}  // namespace

// ---------------------------------------------------------------------------
// Catalog and compositions
// ---------------------------------------------------------------------------

void ElementLineCatalog::validate(const WavelengthGrid& grid) const {
  for (const auto& [element, list] : lines) {
    if (list.empty()) throw Error(Errc::InvalidArgument, "element '" + element + "' has no lines");
    for (const auto& l : list) {
      if (l.center_nm < grid.start_nm || l.center_nm > grid.end_nm)
        throw Error(Errc::InvalidArgument, "line of '" + element + "' at " +
                                               std::to_string(l.center_nm) + " nm is off the grid");
      if (!(l.strength > 0.0 && l.strength <= 1.0))
        throw Error(Errc::InvalidArgument, "line strength of '" + element + "' outside (0, 1]");
    }
  }
}

ElementLineCatalog ElementLineCatalog::parse(std::istream& in) {
  ElementLineCatalog cat;
  for_each_content_line(in, [&](std::string_view line, std::size_t no) {
    const auto f = words(line);
    if (f.size() != 3)
      throw Error(Errc::InvalidArgument,
                  "line " + std::to_string(no) + ": expected '<element> <center_nm> <strength>'");
    cat.lines[std::string(f[0])].push_back({number(f[1], no), number(f[2], no)});
  });
  return cat;
}

ElementLineCatalog ElementLineCatalog::load(const std::string& path) {
  auto in = open_text(path);
  return parse(in);
}

void ElementLineCatalog::write(std::ostream& out) const {
  out << "# element center_nm strength\n";
  for (const auto& [element, list] : lines)
    for (const auto& l : list)
      out << element << ' ' << detail::format_shortest(l.center_nm) << ' '
          << detail::format_shortest(l.strength) << '\n';
}

void AlloyComposition::validate() const {
  double sum = 0.0;
  for (const auto& [element, f] : fractions) {
    if (!(f >= 0.0 && f <= 1.0))
      throw Error(Errc::InvalidArgument, name + ": fraction of '" + element + "' outside [0, 1]");
    sum += f;
  }
  if (sum > 1.0 + 1e-9) throw Error(Errc::InvalidArgument, name + ": fractions sum above 1");
}

std::vector<AlloyComposition> parse_compositions(std::istream& in) {
  std::vector<AlloyComposition> out;
  for_each_content_line(in, [&](std::string_view line, std::size_t no) {
    const auto f = words(line);
    AlloyComposition comp{std::string(f[0]), {}};
    for (std::size_t i = 1; i < f.size(); ++i) {
      const auto eq = f[i].find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw Error(Errc::InvalidArgument,
                    "line " + std::to_string(no) + ": expected '<element>=<fraction>'");
      comp.fractions[std::string(f[i].substr(0, eq))] = number(f[i].substr(eq + 1), no);
    }
    comp.validate();
    out.push_back(std::move(comp));
  });
  return out;
}

std::vector<AlloyComposition> load_compositions(const std::string& path) {
  auto in = open_text(path);
  return parse_compositions(in);
}

void write_compositions(const std::vector<AlloyComposition>& alloys, std::ostream& out) {
  out << "# alloy element=fraction ...\n";
  for (const auto& a : alloys) {
    out << a.name;
    for (const auto& [element, f] : a.fractions)
      out << ' ' << element << '=' << detail::format_shortest(f);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void SynthConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(Errc::InvalidArgument, what); };
  if (!(line_sigma_nm > 0.0)) fail("line_sigma_nm must be > 0");
  if (!(baseline >= 0.0)) fail("baseline must be >= 0");
  if (!(noise_std >= 0.0)) fail("noise_std must be >= 0");
  for (double j : {sample_jitter_rel, offspec_jitter_rel, arc_jitter_rel})
    if (!(j >= 0.0 && j < 1.0)) fail("jitter values must lie in [0, 1)");
  if (peak_scale && !(*peak_scale > 0.0)) fail("peak_scale must be > 0");
}

SynthConfig SynthConfig::parse(std::istream& in) {
  SynthConfig cfg;
  for_each_content_line(in, [&](std::string_view line, std::size_t no) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::InvalidArgument, "line " + std::to_string(no) + ": expected 'key = value'");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key == "seed") {
      const auto v = detail::parse_int(value);
      if (!v || *v < 0) throw Error(Errc::InvalidArgument, "seed must be a non-negative integer");
      cfg.seed = static_cast<std::uint64_t>(*v);
      return;
    }
    const double v = number(value, no);
    if (key == "line_sigma_nm") cfg.line_sigma_nm = v;
    else if (key == "baseline") cfg.baseline = v;
    else if (key == "noise_std") cfg.noise_std = v;
    else if (key == "sample_jitter_rel") cfg.sample_jitter_rel = v;
    else if (key == "offspec_jitter_rel") cfg.offspec_jitter_rel = v;
    else if (key == "arc_jitter_rel") cfg.arc_jitter_rel = v;
    else if (key == "peak_scale") cfg.peak_scale = v;
    else throw Error(Errc::InvalidArgument, "unknown synth config key '" + std::string(key) + "'");
  });
  cfg.validate();
  return cfg;
}

SynthConfig SynthConfig::load(const std::string& path) {
  auto in = open_text(path);
  return parse(in);
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

std::vector<double> element_profile(const std::vector<EmissionLine>& lines, double sigma_nm,
                                    const WavelengthGrid& grid) {
  std::vector<double> out(grid.n_points, 0.0);
  const double inv = 1.0 / (2.0 * sigma_nm * sigma_nm);
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double x = grid.at(i);
    for (const auto& l : lines) out[i] += l.strength * std::exp(-(x - l.center_nm) * (x - l.center_nm) * inv);
  }
  return out;
}

double calibrate_peak_scale(std::span<const AlloyComposition> alloys,
                            const ElementLineCatalog& cat, const SynthConfig& cfg,
                            const WavelengthGrid& grid, double target) {
  double brightest = 0.0;
  for (const auto& a : alloys) {
    const auto s = line_signal(a, cat, cfg.line_sigma_nm, grid, 1.0);
    brightest = std::max(brightest, *std::max_element(s.begin(), s.end()));
  }
  if (!(brightest > 0.0) || !(target > cfg.baseline))
    throw Error(Errc::InvalidArgument, "cannot calibrate peak_scale: no line signal above baseline");
  return (target - cfg.baseline) / brightest;
}

std::vector<double> clean_signal(const AlloyComposition& comp, const ElementLineCatalog& cat,
                                 const SynthConfig& cfg, const WavelengthGrid& grid,
                                 double peak_scale, double gain) {
  auto s = line_signal(comp, cat, cfg.line_sigma_nm, grid, peak_scale);
  for (auto& v : s) v = cfg.baseline + gain * v;
  return s;
}

Spectrum synth_spectrum(const AlloyComposition& comp, const ElementLineCatalog& cat,
                        const SynthConfig& cfg, const WavelengthGrid& grid, RngStream& rng) {
  const double scale = required_peak_scale(cfg);
  return emit(line_signal(comp, cat, cfg.line_sigma_nm, grid, scale), cfg, grid, rng);
}

std::vector<Spectrum> synth_physical_sample(const AlloyComposition& comp,
                                            const ElementLineCatalog& cat, const SynthConfig& cfg,
                                            const WavelengthGrid& grid, int sample_id,
                                            std::size_t n_spectra, RngStream& rng, bool offspec) {
  if (n_spectra == 0) throw Error(Errc::InvalidArgument, "a physical sample needs >= 1 spectrum");
  const double scale = required_peak_scale(cfg);
  const double j = offspec ? cfg.offspec_jitter_rel : cfg.sample_jitter_rel;
  AlloyComposition jittered = comp;
  for (auto& [element, f] : jittered.fractions) f *= rng.uniform(1.0 - j, 1.0 + j);
  const auto lines = line_signal(jittered, cat, cfg.line_sigma_nm, grid, scale);
  std::vector<Spectrum> out;
  out.reserve(n_spectra);
  for (std::size_t i = 0; i < n_spectra; ++i) {
    out.push_back(emit(lines, cfg, grid, rng));
    out.back().sample_id = sample_id;
  }
  return out;
}

LabeledDataset synth_dataset(std::span<const AlloyComposition> alloys,
                             const ElementLineCatalog& cat, const SynthConfig& cfg,
                             const WavelengthGrid& grid, const SynthLayout& layout,
                             GateReport* gate_report) {
  cfg.validate();
  grid.validate();
  cat.validate(grid);
  if (alloys.empty()) throw Error(Errc::EmptyDataset, "no alloy compositions given");
  if (layout.samples_per_alloy == 0 || layout.spectra_per_sample == 0)
    throw Error(Errc::InvalidArgument, "samples_per_alloy and spectra_per_sample must be >= 1");
  SynthConfig scaled = cfg;
  if (!scaled.peak_scale) scaled.peak_scale = calibrate_peak_scale(alloys, cat, cfg, grid);

  std::vector<std::string> names;
  for (const auto& a : alloys) {
    a.validate();
    names.push_back(a.name);
  }
  std::vector<LabeledDataset> parts;
  GateReport report;
  for (std::size_t a = 0; a < alloys.size(); ++a)
    for (std::size_t j = 0; j < layout.samples_per_alloy; ++j) {
      const int id = layout.first_sample_id + static_cast<int>(a * layout.samples_per_alloy + j);
      RngStream rng(cfg.seed, "synth-sample", {static_cast<std::uint64_t>(id)});
      const auto spectra = synth_physical_sample(alloys[a], cat, scaled, grid, id,
                                                 layout.spectra_per_sample, rng, layout.offspec);
      auto [ds, gate] = assemble(spectra, static_cast<int>(a), names, grid);
      report.merge(gate);
      parts.push_back(std::move(ds));
    }
  if (gate_report) *gate_report = report;
  return merge(parts);
}

}  // namespace spectrasort
