#include <doctest.h>

#include <functional>
#include <numeric>

#include "helpers.hpp"
#include "oracles.hpp"
#include "spectrasort/error.hpp"
#include "spectrasort/learn.hpp"

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

std::vector<int> random_labels(std::mt19937_64& g, int n, int k) {
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = i < k ? i : static_cast<int>(g() % k);
  return y;
}

// Two classes split by x0 + 0.5 x1 = 0.3, every point at distance >= 1.
LabeledDataset separable_set(std::mt19937_64& g, int n) {
  WavelengthGrid grid{1.0, 3.0, 3};
  auto ds = empty_dataset(grid, {"neg", "pos"});
  ds.rows.resize(n, 3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  Eigen::Vector3d normal(1.0, 0.5, 0.0);
  normal.normalize();
  int r = 0;
  while (r < n) {
    Eigen::Vector3d p(u(g), u(g), u(g));
    const double dist = normal.dot(p) - 0.3 / std::sqrt(1.25);
    if (std::abs(dist) < 1.0) continue;
    ds.rows.row(r) = p.transpose();
    ds.labels.push_back(dist > 0 ? 1 : 0);
    ds.sample_ids.push_back(1);
    ++r;
  }
  return ds;
}

LabeledDataset shuffled(const LabeledDataset& ds, std::mt19937_64& g) {
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), g);
  return ds.subset(idx);
}

bool same(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("squared-hinge SVM gradient matches central differences") {
  std::mt19937_64 g(31);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = testing::random_matrix(g, 12, 4, -1, 1);
    const auto y = random_labels(g, 12, 3);
    Matrix w = testing::random_matrix(g, 3, 4, -0.5, 0.5);
    Vector b = testing::random_matrix(g, 3, 1, -0.3, 0.3).col(0);
    Matrix gw;
    Vector gb;
    svm_gradient(x, y, w, b, 2.0, LossKind::SquaredHinge, gw, gb);
    const auto total = [&] { return svm_objective(x, y, w, b, 2.0, LossKind::SquaredHinge).sum(); };
    CHECK(oracle::max_fd_error(total, w.data(), w.size(), gw.data()) < 1e-4);
    CHECK(oracle::max_fd_error(total, b.data(), b.size(), gb.data()) < 1e-4);
  }
}

TEST_CASE("SVM objective matches its definition") {
  std::mt19937_64 g(32);
  const Matrix x = testing::random_matrix(g, 9, 3, -1, 1);
  const auto y = random_labels(g, 9, 2);
  const Matrix w = testing::random_matrix(g, 2, 3, -1, 1);
  const Vector b = testing::random_matrix(g, 2, 1, -1, 1).col(0);
  for (auto loss : {LossKind::Hinge, LossKind::SquaredHinge}) {
    const auto obj = svm_objective(x, y, w, b, 0.7, loss);
    for (int c = 0; c < 2; ++c) {
      double expect = 0.5 * w.row(c).squaredNorm();
      for (int i = 0; i < 9; ++i) {
        const double yi = y[i] == c ? 1 : -1;
        const double slack = std::max(0.0, 1 - yi * (w.row(c).dot(x.row(i)) + b[c]));
        expect += 0.7 * (loss == LossKind::Hinge ? slack : slack * slack);
      }
      CHECK(obj[c] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("logistic regression gradient matches central differences") {
  std::mt19937_64 g(33);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = testing::random_matrix(g, 15, 5, -1, 1);
    const auto y = random_labels(g, 15, 4);
    Matrix w = testing::random_matrix(g, 4, 5, -0.5, 0.5);
    Vector b = testing::random_matrix(g, 4, 1, -0.3, 0.3).col(0);
    Matrix gw;
    Vector gb;
    logreg_gradient(x, y, w, b, 0.1, gw, gb);
    const auto f = [&] { return logreg_objective(x, y, w, b, 0.1); };
    CHECK(oracle::max_fd_error(f, w.data(), w.size(), gw.data()) < 1e-4);
    CHECK(oracle::max_fd_error(f, b.data(), b.size(), gb.data()) < 1e-4);
  }
}

TEST_CASE("logistic objective matches its definition") {
  Matrix x(2, 1);
  x << 1, -1;
  Matrix w(2, 1);
  w << 0.5, -0.5;
  Vector b(2);
  b << 0.1, 0.0;
  const std::vector<int> y = {0, 0};
  const double s0 = std::exp(0.6) / (std::exp(0.6) + std::exp(-0.5));
  const double s1 = std::exp(-0.4) / (std::exp(-0.4) + std::exp(0.5));
  const double expect = -(std::log(s0) + std::log(s1)) / 2 + 0.5 * 0.2 * 0.5;
  CHECK(logreg_objective(x, y, w, b, 0.2) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("MLP gradient matches central differences") {
  std::mt19937_64 g(34);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = testing::random_matrix(g, 10, 4, -1, 1);
    MlpModel net;
    do {
      net.w1 = testing::random_matrix(g, 6, 4, -0.5, 0.5);
      net.b1 = testing::random_matrix(g, 6, 1, -0.2, 0.2).col(0);
    } while (oracle::min_abs_preactivation(net, x) < 1e-3);
    net.w2 = testing::random_matrix(g, 3, 6, -0.5, 0.5);
    net.b2 = testing::random_matrix(g, 3, 1, -0.2, 0.2).col(0);
    const auto y = random_labels(g, 10, 3);
    const auto grad = mlp_gradient(net, x, y);
    const auto f = [&] { return mlp_loss(net, x, y); };
    CHECK(oracle::max_fd_error(f, net.w1.data(), net.w1.size(), grad.w1.data()) < 1e-4);
    CHECK(oracle::max_fd_error(f, net.b1.data(), net.b1.size(), grad.b1.data()) < 1e-4);
    CHECK(oracle::max_fd_error(f, net.w2.data(), net.w2.size(), grad.w2.data()) < 1e-4);
    CHECK(oracle::max_fd_error(f, net.b2.data(), net.b2.size(), grad.b2.data()) < 1e-4);
  }
}

TEST_CASE("separable set: perfect training accuracy and unit margins") {
  for (int seed : {35, 135, 235, 335}) {
    std::mt19937_64 g(seed);
    const auto ds = separable_set(g, 80 + seed % 100);
    for (auto loss : {LossKind::Hinge, LossKind::SquaredHinge}) {
      const auto m = train_linear_svm(ds, 1000.0, loss, ScalerKind::NoScaler, 1);
      CHECK(m.solver_report.all_converged());
      const auto pred = predict(m, ds.rows);
      CHECK(pred == ds.labels);
      const Matrix s = decision_values(m, ds.rows);
      double worst = 1e9;
      for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (int c = 0; c < 2; ++c) worst = std::min(worst, (ds.labels[i] == c ? 1 : -1) * s(i, c));
      CHECK(worst >= 1.0 - 1e-3);
    }
  }
}

TEST_CASE("SVM objective trace never increases") {
  std::mt19937_64 g(36);
  const auto ds = testing::blob_dataset(g, 3, 20, 6, 0.3);
  const auto m = train_linear_svm(ds, 1.0, LossKind::SquaredHinge, ScalerKind::Standard, 5);
  for (const auto& trace : m.solver_report.objective_trace) {
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
  }
  CHECK(m.weights.rows() == 3);
  CHECK(m.solver_report.final_objective.size() == 3);
}

TEST_CASE("SVM stops unconverged at max_iter") {
  std::mt19937_64 g(37);
  const auto ds = testing::blob_dataset(g, 3, 20, 6, 0.5);
  SolverOptions o;
  o.max_iter = 1;
  const auto m = train_linear_svm(ds, 100.0, LossKind::Hinge, ScalerKind::Standard, 5, o);
  CHECK_FALSE(m.solver_report.all_converged());
  for (int it : m.solver_report.iterations) CHECK(it == 1);
}

TEST_CASE("decision values are W scale(x) + b") {
  std::mt19937_64 g(38);
  const auto ds = testing::blob_dataset(g, 3, 10, 5);
  const auto m = train_linear_svm(ds, 1.0, LossKind::SquaredHinge, ScalerKind::MinMax, 1);
  const Matrix x = testing::random_matrix(g, 4, 5);
  const Matrix s = decision_values(m, x);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 3; ++c) {
      double v = m.bias[c];
      for (int j = 0; j < 5; ++j) {
        const double sp = m.scaler.spread[j];
        const double z = sp > 0 ? (x(r, j) - m.scaler.location[j]) / sp : 0.0;
        v += m.weights(c, j) * z;
      }
      CHECK(s(r, c) == doctest::Approx(v).epsilon(1e-12));
    }
    const Vector xr = x.row(r).transpose();
    const Vector one = decision_values(m, Eigen::Ref<const Vector>(xr));
    CHECK((one - s.row(r).transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(code_of([&] { decision_values(m, testing::random_matrix(g, 1, 4)); }) == Errc::DimensionMismatch);
}

TEST_CASE("every trainer is invariant under training-row permutations") {
  std::mt19937_64 g(39);
  const auto ds = testing::blob_dataset(g, 3, 12, 5, 0.3);
  const auto perm = shuffled(ds, g);
  const Matrix probe = testing::random_matrix(g, 20, 5);

  const auto a = train_linear_svm(ds, 1.0, LossKind::SquaredHinge, ScalerKind::Standard, 3);
  const auto b = train_linear_svm(perm, 1.0, LossKind::SquaredHinge, ScalerKind::Standard, 3);
  CHECK(same(a.weights, b.weights));
  CHECK(same(decision_values(a, probe), decision_values(b, probe)));

  SolverOptions few;
  few.max_iter = 30;
  const auto la = train_logreg(ds, 1e-3, ScalerKind::Robust, 3, few);
  const auto lb = train_logreg(perm, 1e-3, ScalerKind::Robust, 3, few);
  CHECK(same(la.weights, lb.weights));

  const auto ka = train_knn(ds, 3, ScalerKind::MaxAbs);
  const auto kb = train_knn(perm, 3, ScalerKind::MaxAbs);
  CHECK(predict(ka, probe) == predict(kb, probe));

  MlpOptions mo;
  mo.hidden_units = 8;
  mo.epochs = 5;
  mo.batch_size = 4;
  const auto ma = train_mlp(ds, mo, ScalerKind::Normalizer, 3);
  const auto mb = train_mlp(perm, mo, ScalerKind::Normalizer, 3);
  CHECK(same(ma.w1, mb.w1));
  CHECK(same(ma.w2, mb.w2));
}

TEST_CASE("logistic regression fits blobs and its trace never increases") {
  std::mt19937_64 g(40);
  const auto ds = testing::blob_dataset(g, 3, 20, 6, 0.1);
  const auto m = train_logreg(ds, 1e-4, ScalerKind::Standard, 1);
  const auto& t = m.solver_report.objective_trace.at(0);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] <= t[i - 1]);
  CHECK(predict(m, ds.rows) == ds.labels);
  const Matrix p = class_scores(Model{m}, ds.rows);
  for (Eigen::Index r = 0; r < p.rows(); ++r) CHECK(p.row(r).sum() == doctest::Approx(1.0));
}

TEST_CASE("MLP training lowers the loss and is seed-determined") {
  std::mt19937_64 g(41);
  const auto ds = testing::blob_dataset(g, 3, 20, 6, 0.1);
  MlpOptions o;
  o.hidden_units = 16;
  o.epochs = 60;
  o.learning_rate = 0.05;
  o.batch_size = 8;
  const auto a = train_mlp(ds, o, ScalerKind::Standard, 9);
  const auto b = train_mlp(ds, o, ScalerKind::Standard, 9);
  const auto c = train_mlp(ds, o, ScalerKind::Standard, 10);
  CHECK(a.training_report.epochs == 60);
  CHECK(a.training_report.final_loss < a.training_report.initial_loss);
  CHECK(same(a.w1, b.w1));
  CHECK_FALSE(same(a.w1, c.w1));
  CHECK(predict(a, ds.rows) == ds.labels);
}

TEST_CASE("k-NN agrees with a brute-force vote") {
  std::mt19937_64 g(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = testing::blob_dataset(g, 3, 8, 4, 0.4);
    const int k = 1 + 2 * static_cast<int>(g() % 4);
    const auto m = train_knn(ds, k, ScalerKind::NoScaler);
    const Matrix q = testing::random_matrix(g, 15, 4);
    const auto got = predict(m, q);
    for (int r = 0; r < q.rows(); ++r) {
      std::vector<std::pair<double, int>> dist;
      for (std::size_t i = 0; i < ds.size(); ++i)
        dist.emplace_back((ds.rows.row(i) - q.row(r)).squaredNorm(), ds.labels[i]);
      std::sort(dist.begin(), dist.end());
      std::vector<int> votes(3, 0);
      std::vector<double> dsum(3, 0.0);
      for (int j = 0; j < k; ++j) {
        ++votes[dist[j].second];
        dsum[dist[j].second] += std::sqrt(dist[j].first);
      }
      int best = 0;
      for (int c = 1; c < 3; ++c)
        if (votes[c] > votes[best] || (votes[c] == votes[best] && dsum[c] < dsum[best])) best = c;
      REQUIRE(got[r] == best);
    }
  }
}

TEST_CASE("k-NN vote ties go to the smaller summed distance, then the lower class") {
  WavelengthGrid grid{1, 2, 2};
  auto ds = empty_dataset(grid, {"a", "b", "c"});
  ds.rows.resize(3, 2);
  ds.rows << 0.0, 0.0, 0.3, 0.0, 0.9, 0.0;
  ds.labels = {2, 1, 0};
  ds.sample_ids = {1, 1, 1};
  const auto m = train_knn(ds, 3, ScalerKind::NoScaler);
  Matrix q(2, 2);
  // One vote per class both times; the smaller distance decides.
  q << 0.1, 0.0, 0.45, 0.0;
  CHECK(predict(m, q) == std::vector<int>{2, 1});

  auto sym = empty_dataset(grid, {"a", "b"});
  sym.rows.resize(2, 2);
  sym.rows << 0.0, 0.0, 1.0, 0.0;
  sym.labels = {1, 0};
  sym.sample_ids = {1, 1};
  // Equidistant single neighbours: the lower class index wins.
  Matrix mid(1, 2);
  mid << 0.5, 0.0;
  CHECK(predict(train_knn(sym, 1, ScalerKind::NoScaler), mid) == std::vector<int>{0});
}

TEST_CASE("argmax ties go to the lowest index") {
  Vector s(4);
  s << 0.2, 0.7, 0.7, -1;
  CHECK(argmax_lowest(s) == 1);
}

TEST_CASE("trainer argument errors") {
  std::mt19937_64 g(43);
  const auto ds = testing::blob_dataset(g, 2, 5, 3);
  auto one = ds;
  std::fill(one.labels.begin(), one.labels.end(), 0);
  CHECK(code_of([&] { train_linear_svm(one, 1.0, LossKind::Hinge, ScalerKind::Standard, 1); }) == Errc::SingleClass);
  CHECK(code_of([&] { train_logreg(one, 0.1, ScalerKind::Standard, 1); }) == Errc::SingleClass);
  CHECK(code_of([&] { train_mlp(one, {}, ScalerKind::Standard, 1); }) == Errc::SingleClass);
  CHECK(code_of([&] { train_linear_svm(ds, 0.0, LossKind::Hinge, ScalerKind::Standard, 1); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { train_knn(ds, 4, ScalerKind::Standard); }) == Errc::BadK);
  CHECK(code_of([&] { train_knn(ds, 0, ScalerKind::Standard); }) == Errc::BadK);
  CHECK(code_of([&] { train_knn(ds, 11, ScalerKind::Standard); }) == Errc::BadK);
}

TEST_CASE("canonical order sorts by label then intensities") {
  Matrix rows(4, 2);
  rows << 0.5, 0.1, 0.2, 0.9, 0.5, 0.0, 0.1, 0.1;
  const std::vector<int> labels = {1, 1, 1, 0};
  CHECK(canonical_row_order(rows, labels) == std::vector<std::size_t>{3, 1, 2, 0});
  CHECK(count_present_classes(labels) == 2);
}
