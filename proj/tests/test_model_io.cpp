#include <doctest.h>

#include <functional>
#include <sstream>

#include "helpers.hpp"
#include "spectrasort/error.hpp"
#include "spectrasort/learn.hpp"

using namespace spectrasort;

namespace {

Errc load_error(const std::string& text) {
  std::istringstream in(text);
  try {
    load_model(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("model loaded");
  return Errc::Io;
}

std::string saved(const Model& m) {
  std::ostringstream out;
  save_model(m, out);
  return out.str();
}

std::vector<Model> all_kinds() {
  std::mt19937_64 g(51);
  const auto ds = testing::blob_dataset(g, 3, 10, 7, 0.3);
  MlpOptions mo;
  mo.hidden_units = 5;
  mo.epochs = 3;
  return {train_linear_svm(ds, 1.0, LossKind::Hinge, ScalerKind::Robust, 1),
          train_logreg(ds, 1e-3, ScalerKind::Standard, 1), train_knn(ds, 3, ScalerKind::MinMax),
          train_mlp(ds, mo, ScalerKind::Normalizer, 1)};
}

}  // namespace

TEST_CASE("every model kind round-trips with bit-identical predictions and scores") {
  std::mt19937_64 g(52);
  const Matrix probe = testing::random_matrix(g, 100, 7);
  for (const auto& m : all_kinds()) {
    INFO("kind ", model_kind(m));
    const auto text = saved(m);
    std::istringstream in(text);
    const auto back = load_model(in);
    CHECK(model_kind(back) == model_kind(m));
    CHECK(class_names(back) == class_names(m));
    CHECK(model_grid(back) == model_grid(m));
    CHECK(predict(back, probe) == predict(m, probe));
    const Matrix a = class_scores(m, probe), b = class_scores(back, probe);
    CHECK((a.array() == b.array()).all());
    // Saving the loaded model reproduces the file byte for byte.
    CHECK(saved(back) == text);
  }
}

TEST_CASE("model files are deterministic") {
  const auto a = all_kinds(), b = all_kinds();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(saved(a[i]) == saved(b[i]));
}

TEST_CASE("corruption is detected") {
  const auto text = saved(all_kinds().front());
  CHECK(load_error("") == Errc::CorruptModel);
  CHECK(load_error("not a model\n") == Errc::CorruptModel);
  CHECK(load_error(text.substr(0, text.size() / 2)) == Errc::CorruptModel);
  CHECK(load_error(text.substr(0, text.size() - 1)) == Errc::CorruptModel);

  auto flipped = text;
  const auto pos = flipped.find("weights");
  REQUIRE(pos != std::string::npos);
  flipped[pos + 20] = flipped[pos + 20] == '1' ? '2' : '1';
  CHECK(load_error(flipped) == Errc::CorruptModel);

  auto no_sum = text.substr(0, text.rfind("checksum"));
  CHECK(load_error(no_sum) == Errc::CorruptModel);
}

TEST_CASE("a newer format version is refused") {
  auto text = saved(all_kinds().front());
  const auto pos = text.find("version 1\n");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 10, "version 2\n");
  CHECK(load_error(text) == Errc::VersionUnsupported);
}

TEST_CASE("model file errors name the path") {
  try {
    load_model_file("/nonexistent/model.txt");
    FAIL("loaded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Io);
    CHECK(std::string(e.what()).find("/nonexistent/model.txt") != std::string::npos);
  }
  const auto dir = testing::scratch_dir("model_io");
  const auto path = (dir / "bad.model").string();
  testing::spit(path, "spectrasort-model\nversion 1\n");
  try {
    load_model_file(path);
    FAIL("loaded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CorruptModel);
    CHECK(std::string(e.what()).find(path) != std::string::npos);
  }
}
