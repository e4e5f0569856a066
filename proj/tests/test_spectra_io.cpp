#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "helpers.hpp"
#include "spectrasort/error.hpp"
#include "spectrasort/preprocess.hpp"
#include "spectrasort/spectra_io.hpp"

using namespace spectrasort;

namespace {

WavelengthGrid small_grid() { return {400.0, 404.0, 5}; }

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::Io;
}

}  // namespace

TEST_CASE("grid points are evenly spaced and end exactly at end_nm") {
  const WavelengthGrid g{350.0, 700.0, 3648};
  const auto p = g.points();
  CHECK(p.front() == 350.0);
  CHECK(p.back() == 700.0);
  CHECK(p[1] - p[0] == doctest::Approx(350.0 / 3647));
  CHECK_THROWS_AS(WavelengthGrid({1.0, 1.0, 5}).validate(), Error);
  CHECK_THROWS_AS(WavelengthGrid({1.0, 2.0, 1}).validate(), Error);
}

TEST_CASE("raw parse keeps header and footer lines as metadata") {
  std::istringstream in(
      "Device: demo\n"
      "Wavelength;Intensity\n"
      "400;0.1\n401;0.2\n402;0.3\n403;0.4\n404;0.5\n"
      "-- end --\n");
  const auto s = parse_raw_spectrum(in, small_grid(), 7);
  CHECK(s.sample_id == 7);
  REQUIRE(s.intensities.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(s.intensities[i] == doctest::Approx(0.1 * (i + 1)));
  CHECK(s.metadata.size() == 3);
  CHECK(s.metadata.at(0) == "Device: demo");
  CHECK(s.metadata.at(7) == "-- end --");
}

TEST_CASE("raw parse accepts comma separators, CRLF and the Unicode minus") {
  std::istringstream in("400,0.0\r\n402,\xE2\x88\x92" "0.0\r\n404,1.0\r\n");
  const auto s = parse_raw_spectrum(in, small_grid(), 0);
  CHECK(s.intensities[4] == 1.0);
  CHECK(s.intensities[3] == doctest::Approx(0.5));
  CHECK(s.metadata.empty());
}

TEST_CASE("numeric-looking lines that do not split into two fields are metadata") {
  std::istringstream in("400;0.1\n12:30:01 acquisition\n404;0.5\n1;2;3\n");
  const auto s = parse_raw_spectrum(in, small_grid(), 0);
  CHECK(s.metadata.size() == 2);
  CHECK(s.intensities[2] == doctest::Approx(0.3));
}

TEST_CASE("raw parse errors") {
  const auto g = small_grid();
  CHECK(code_of([&] {
          std::istringstream in("header only\n400;0.5\n");
          parse_raw_spectrum(in, g, 0);
        }) == Errc::NoDataRows);
  CHECK(code_of([&] {
          std::istringstream in("400;0.5\n402;0.5\n401;0.5\n");
          parse_raw_spectrum(in, g, 0);
        }) == Errc::NonMonotoneWavelengths);
  CHECK(code_of([&] {
          std::istringstream in("400;0.5\n402;0.5\n402;0.6\n");
          parse_raw_spectrum(in, g, 0);
        }) == Errc::NonMonotoneWavelengths);
  CHECK(code_of([&] {
          std::istringstream in("400;0.5\n402;1.5\n");
          parse_raw_spectrum(in, g, 0);
        }) == Errc::IntensityOutOfRange);
  CHECK(code_of([&] {
          std::istringstream in("400;-0.01\n402;0.5\n");
          parse_raw_spectrum(in, g, 0);
        }) == Errc::IntensityOutOfRange);
  CHECK(code_of([&] { parse_raw_spectrum_file("/nonexistent/file.txt", g, 0); }) == Errc::Io);
}

TEST_CASE("values a hair outside [0,1] are clamped, not rejected") {
  std::istringstream in("400;1.0000000001\n404;-0.0000000001\n");
  const auto s = parse_raw_spectrum(in, small_grid(), 0);
  CHECK(s.intensities.front() == 1.0);
  CHECK(s.intensities.back() == 0.0);
}

TEST_CASE("resampling interpolates linearly and zeroes points outside the knots") {
  const std::vector<std::pair<double, double>> knots = {{401.0, 0.2}, {403.0, 0.6}};
  const auto out = resample_to_grid(knots, small_grid());
  const std::vector<double> expect = {0.0, 0.2, 0.4, 0.6, 0.0};
  for (int i = 0; i < 5; ++i) CHECK(out[i] == doctest::Approx(expect[i]).epsilon(1e-15));
}

TEST_CASE("resampling reproduces any linear function inside the knot span") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = u(g), b = u(g) * 0.001;
    std::vector<std::pair<double, double>> knots;
    double x = 349.0;
    while (x < 701.0) {
      knots.emplace_back(x, a + b * x);
      x += 0.1 + 2.0 * u(g);
    }
    knots.emplace_back(702.0, a + b * 702.0);
    const WavelengthGrid grid{350.0, 700.0, 301};
    const auto out = resample_to_grid(knots, grid);
    for (std::size_t i = 0; i < grid.n_points; ++i)
      REQUIRE(out[i] == doctest::Approx(a + b * grid.at(i)).epsilon(1e-12));
  }
}

TEST_CASE("dataset file round-trips bit for bit after quantization") {
  std::mt19937_64 g(3);
  auto ds = testing::blob_dataset(g, 3, 7, 9);
  for (Eigen::Index r = 0; r < ds.rows.rows(); ++r)
    for (Eigen::Index c = 0; c < ds.rows.cols(); ++c) ds.rows(r, c) = quantize_intensity(ds.rows(r, c));
  std::stringstream buf;
  write_dataset(ds, buf);
  const auto back = read_dataset(buf, ds.class_names);
  CHECK(back.grid == ds.grid);
  CHECK(back.labels == ds.labels);
  CHECK(back.sample_ids == ds.sample_ids);
  CHECK((back.rows.array() == ds.rows.array()).all());
}

TEST_CASE("quantize_intensity is idempotent and keeps 9 significant digits") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(g);
    const double q = quantize_intensity(v);
    REQUIRE(quantize_intensity(q) == q);
    REQUIRE(std::abs(q - v) <= 5e-9 * std::max(v, 1e-300) + 1e-300);
  }
}

TEST_CASE("dataset header and rows are checked") {
  const std::vector<std::string> names = {"a", "b"};
  const auto read = [&](const std::string& text, std::optional<WavelengthGrid> grid = std::nullopt) {
    std::istringstream in(text);
    return read_dataset(in, names, grid);
  };
  const std::string header = "alloy_index,sample_id,nm400.000,nm402.000\n";
  CHECK(read(header + "1,5,0.5,0.25\n").rows(0, 1) == 0.25);
  CHECK(code_of([&] { read("label,sample_id,nm400.000,nm402.000\n"); }) == Errc::SchemaMismatch);
  CHECK(code_of([&] { read(header + "1,5,0.5\n"); }) == Errc::SchemaMismatch);
  CHECK(code_of([&] { read(header + "2,5,0.5,0.5\n"); }) == Errc::LabelOutOfRange);
  CHECK(code_of([&] { read(header + "1,5,0.5,1.5\n"); }) == Errc::IntensityOutOfRange);
  CHECK(code_of([&] { read(header, WavelengthGrid{400.0, 402.0, 3}); }) == Errc::SchemaMismatch);
  CHECK(code_of([&] { read(header, WavelengthGrid{400.0, 403.0, 2}); }) == Errc::SchemaMismatch);
}

TEST_CASE("wavelength column names carry three decimals") {
  CHECK(wavelength_column(350.0) == "nm350.000");
  CHECK(wavelength_column(400.0956) == "nm400.096");
}

TEST_CASE("class-name sidecar round-trips") {
  const auto dir = testing::scratch_dir("sidecar");
  const auto path = (dir / "names").string();
  write_class_names({"M1", "H13"}, path);
  CHECK(read_class_names(path) == std::vector<std::string>{"M1", "H13"});
  CHECK_FALSE(read_class_names((dir / "absent").string()).has_value());
}
