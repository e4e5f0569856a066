#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "helpers.hpp"
#include "spectrasort/error.hpp"
#include "spectrasort/eval.hpp"
#include "spectrasort/synthgen.hpp"

using namespace spectrasort;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::Io;
}

const WavelengthGrid small_grid{350.0, 700.0, 700};

}  // namespace

TEST_CASE("catalog text round-trips") {
  const auto cat = default_catalog();
  std::ostringstream out;
  cat.write(out);
  std::istringstream in(out.str());
  const auto back = ElementLineCatalog::parse(in);
  REQUIRE(back.lines.size() == cat.lines.size());
  for (const auto& [element, list] : cat.lines) {
    const auto& other = back.lines.at(element);
    REQUIRE(other.size() == list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      CHECK(other[i].center_nm == list[i].center_nm);
      CHECK(other[i].strength == list[i].strength);
    }
  }
  std::istringstream bad("Fe 400\n");
  CHECK(code_of([&] { ElementLineCatalog::parse(bad); }) == Errc::InvalidArgument);
  ElementLineCatalog off;
  off.lines["X"] = {{900.0, 1.0}};
  CHECK(code_of([&] { off.validate(small_grid); }) == Errc::InvalidArgument);
}

TEST_CASE("shipped data files equal the built-in presets") {
  const auto cat = ElementLineCatalog::load(SPECTRASORT_REPO_DATA "/catalog.txt");
  const auto def = default_catalog();
  REQUIRE(cat.lines.size() == def.lines.size());
  for (const auto& [element, list] : def.lines) {
    REQUIRE(cat.lines.at(element).size() == list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      CHECK(cat.lines.at(element)[i].center_nm == list[i].center_nm);
      CHECK(cat.lines.at(element)[i].strength == list[i].strength);
    }
  }
  const auto comps = load_compositions(SPECTRASORT_REPO_DATA "/compositions.txt");
  const auto defc = default_compositions();
  REQUIRE(comps.size() == defc.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    CHECK(comps[i].name == defc[i].name);
    CHECK(comps[i].fractions == defc[i].fractions);
    CHECK(comps[i].name == default_alloy_names()[i]);
  }
  const auto cfg = SynthConfig::load(SPECTRASORT_REPO_DATA "/synth.conf");
  const SynthConfig d;
  CHECK(cfg.line_sigma_nm == d.line_sigma_nm);
  CHECK(cfg.baseline == d.baseline);
  CHECK(cfg.noise_std == d.noise_std);
  CHECK(cfg.sample_jitter_rel == d.sample_jitter_rel);
  CHECK(cfg.offspec_jitter_rel == d.offspec_jitter_rel);
  CHECK(cfg.arc_jitter_rel == d.arc_jitter_rel);
  CHECK(cfg.seed == d.seed);
  CHECK_FALSE(cfg.peak_scale.has_value());
}

TEST_CASE("composition and config parsing errors") {
  std::istringstream sum_high("A Fe=0.7 Cr=0.4\n");
  CHECK(code_of([&] { parse_compositions(sum_high); }) == Errc::InvalidArgument);
  std::istringstream no_eq("A Fe0.7\n");
  CHECK(code_of([&] { parse_compositions(no_eq); }) == Errc::InvalidArgument);
  std::istringstream unknown("colour = 3\n");
  CHECK(code_of([&] { SynthConfig::parse(unknown); }) == Errc::InvalidArgument);
  std::istringstream jitter("arc_jitter_rel = 1.5\n");
  CHECK(code_of([&] { SynthConfig::parse(jitter); }) == Errc::InvalidArgument);
  std::istringstream ok("# c\nnoise_std = 0.5  # trailing\npeak_scale = 2\nseed = 7\n");
  const auto cfg = SynthConfig::parse(ok);
  CHECK(cfg.noise_std == 0.5);
  CHECK(cfg.peak_scale == 2.0);
  CHECK(cfg.seed == 7);
}

TEST_CASE("clean signal equals a direct Gaussian sum") {
  ElementLineCatalog cat;
  cat.lines["A"] = {{400.0, 1.0}, {450.0, 0.5}};
  cat.lines["B"] = {{500.0, 0.8}};
  const AlloyComposition comp{"x", {{"A", 0.6}, {"B", 0.3}}};
  SynthConfig cfg;
  const double scale = 1.7, gain = 0.9;
  const auto s = clean_signal(comp, cat, cfg, small_grid, scale, gain);
  const double sig = cfg.line_sigma_nm;
  const auto g = [sig](double x, double c) { return std::exp(-(x - c) * (x - c) / (2 * sig * sig)); };
  for (std::size_t i = 0; i < small_grid.n_points; ++i) {
    const double x = small_grid.at(i);
    const double expect =
        cfg.baseline + gain * scale * (0.6 * (g(x, 400) + 0.5 * g(x, 450)) + 0.3 * 0.8 * g(x, 500));
    REQUIRE(s[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  const AlloyComposition missing{"y", {{"Z", 0.1}}};
  CHECK(code_of([&] { clean_signal(missing, cat, cfg, small_grid, 1.0); }) == Errc::UnknownElement);
}

TEST_CASE("calibration puts the brightest clean peak at the target") {
  const auto comps = default_compositions();
  const auto cat = default_catalog();
  const SynthConfig cfg;
  const double scale = calibrate_peak_scale(comps, cat, cfg, small_grid, 0.7);
  double brightest = 0.0;
  for (const auto& c : comps) {
    const auto s = clean_signal(c, cat, cfg, small_grid, scale);
    brightest = std::max(brightest, *std::max_element(s.begin(), s.end()));
  }
  CHECK(brightest == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("synthetic datasets follow the sample layout and replay exactly") {
  const auto comps = default_compositions();
  const auto cat = default_catalog();
  SynthConfig cfg;
  SynthLayout layout;
  layout.samples_per_alloy = 2;
  layout.spectra_per_sample = 4;
  GateReport gate;
  const auto ds = synth_dataset(comps, cat, cfg, small_grid, layout, &gate);
  ds.validate();
  CHECK(ds.class_names == default_alloy_names());
  CHECK(gate.total() == 12 * 2 * 4);
  CHECK(ds.size() == gate.counts.at(GateReason::Accepted));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int local = ds.sample_ids[i] - 101;
    CHECK(local / 2 == ds.labels[i]);
  }
  const auto again = synth_dataset(comps, cat, cfg, small_grid, layout);
  CHECK((ds.rows.array() == again.rows.array()).all());
  CHECK(ds.sample_ids == again.sample_ids);

  cfg.seed += 1;
  const auto other = synth_dataset(comps, cat, cfg, small_grid, layout);
  CHECK_FALSE((ds.rows.array() == other.rows.array()).all());

  layout.first_sample_id = 201;
  layout.offspec = true;
  const auto off = synth_dataset(comps, cat, SynthConfig{}, small_grid, layout);
  CHECK(off.distinct_sample_ids().front() == 201);
  CHECK(off.distinct_sample_ids().back() == 201 + 23);
}

TEST_CASE("a physical sample shares one jittered composition") {
  const auto comps = default_compositions();
  const auto cat = default_catalog();
  SynthConfig cfg;
  cfg.noise_std = 0.0;
  cfg.arc_jitter_rel = 0.0;
  cfg.peak_scale = calibrate_peak_scale(comps, cat, cfg, small_grid);
  RngStream rng(3, "test");
  const auto spectra = synth_physical_sample(comps[0], cat, cfg, small_grid, 9, 3, rng);
  REQUIRE(spectra.size() == 3);
  // Without per-spectrum noise or gain every spectrum of a sample is identical.
  CHECK(spectra[0].intensities == spectra[1].intensities);
  CHECK(spectra[1].intensities == spectra[2].intensities);
  CHECK(spectra[0].sample_id == 9);
  for (double v : spectra[0].intensities) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(code_of([&] { synth_physical_sample(comps[0], cat, cfg, small_grid, 9, 0, rng); }) ==
        Errc::InvalidArgument);
  SynthConfig unset;
  CHECK(code_of([&] { synth_spectrum(comps[0], cat, unset, small_grid, rng); }) ==
        Errc::InvalidArgument);
}
