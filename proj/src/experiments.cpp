#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "spectrasort/error.hpp"
#include "spectrasort/eval.hpp"
#include "spectrasort/parallel.hpp"
#include "spectrasort/rng.hpp"

namespace spectrasort {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::LinearSvm: return "linear-svm";
    case Algorithm::LogReg: return "logreg";
    case Algorithm::Knn: return "knn";
    case Algorithm::Mlp: return "mlp";
  }
  return "unknown";
}

std::optional<Algorithm> algorithm_from_string(std::string_view s) {
  for (auto a : {Algorithm::LinearSvm, Algorithm::LogReg, Algorithm::Knn, Algorithm::Mlp})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

Model fit(const Pipeline& p, const LabeledDataset& train, std::uint64_t seed) {
  switch (p.algorithm) {
    case Algorithm::LinearSvm:
      return train_linear_svm(train, p.hp.c, p.hp.loss, p.scaler, seed, p.hp.solver);
    case Algorithm::LogReg:
      return train_logreg(train, p.hp.lambda, p.scaler, seed, p.hp.solver);
    case Algorithm::Knn:
      return train_knn(train, p.hp.k, p.scaler);
    case Algorithm::Mlp:
      return train_mlp(train, p.hp.mlp, p.scaler, seed);
  }
  throw Error(Errc::InvalidArgument, "unknown algorithm");
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::InvalidArgument, "median of no values");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(v.size()));
}

double test_f1(const Model& m, const LabeledDataset& test) {
  return macro_f1(confusion_matrix(test.labels, predict(m, test.rows), test.n_classes()));
}

std::pair<LabeledDataset, LabeledDataset> fold_split(const LabeledDataset& ds,
                                                     const std::vector<int>& fold_of_row,
                                                     int fold) {
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i)
    (fold_of_row[i] == fold ? test : train).push_back(i);
  return {ds.subset(train), ds.subset(test)};
}

void check_folds(const LabeledDataset& ds, const std::vector<int>& fold_of_row, int k) {
  if (fold_of_row.size() != ds.size())
    throw Error(Errc::InvalidArgument, "fold assignment does not cover the dataset");
  for (int f : fold_of_row)
    if (f < 0 || f >= k) throw Error(Errc::InvalidArgument, "fold index out of range");
}

/// F1 on one fold. The model seed depends on the fold only, so every cell
/// of a sweep or grid sees the same randomness per fold.
double fold_score(const LabeledDataset& ds, const std::vector<int>& fold_of_row, int fold,
                  const Pipeline& p, std::uint64_t seed) {
  const auto [train, test] = fold_split(ds, fold_of_row, fold);
  const auto model = fit(p, train, derive_seed(seed, "fold-model", {static_cast<std::uint64_t>(fold)}));
  return test_f1(model, test);
}

}  // namespace

std::vector<int> stratified_folds(const LabeledDataset& ds, int k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::InvalidArgument, "k-fold needs k >= 2, got " + std::to_string(k));
  std::vector<std::vector<std::size_t>> by_class(ds.n_classes());
  for (std::size_t i = 0; i < ds.size(); ++i)
    by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
  std::vector<int> fold(ds.size(), -1);
  int dealer = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    if (rows.empty()) continue;
    if (rows.size() < static_cast<std::size_t>(k))
      throw Error(Errc::TooFewRows, "class '" + ds.class_names[c] + "' has " +
                                        std::to_string(rows.size()) + " rows, fewer than k = " +
                                        std::to_string(k));
    RngStream rng(seed, "cv-shuffle", {c});
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
      std::swap(rows[i], rows[i + rng.below(rows.size() - i)]);
    for (auto r : rows) {
      fold[r] = dealer;
      dealer = (dealer + 1) % k;
    }
  }
  return fold;
}

CVReport cv_with_folds(const LabeledDataset& ds, const std::vector<int>& fold_of_row, int k,
                       const Pipeline& p, std::uint64_t seed, int jobs) {
  check_folds(ds, fold_of_row, k);
  CVReport r;
  r.k = k;
  r.seed = seed;
  r.pipeline = p;
  r.fold_of_row = fold_of_row;
  r.fold_f1.assign(static_cast<std::size_t>(k), 0.0);
  parallel_for(static_cast<std::size_t>(k), jobs, [&](std::size_t f) {
    r.fold_f1[f] = fold_score(ds, fold_of_row, static_cast<int>(f), p, seed);
  });
  mean_std(r.fold_f1, r.mean_f1, r.std_f1);
  return r;
}

CVReport kfold_cv(const LabeledDataset& ds, int k, const Pipeline& p, std::uint64_t seed,
                  int jobs) {
  return cv_with_folds(ds, stratified_folds(ds, k, seed), k, p, seed, jobs);
}

SweepReport sweep(const LabeledDataset& ds, std::span<const Algorithm> algorithms,
                  std::span<const ScalerKind> scalers, int k, std::uint64_t seed,
                  const Hyperparams& hp, int jobs) {
  SweepReport r;
  r.k = k;
  r.seed = seed;
  r.hp = hp;
  r.fold_of_row = stratified_folds(ds, k, seed);
  for (auto a : algorithms)
    for (auto s : scalers) r.cells.push_back({a, s, std::vector<double>(static_cast<std::size_t>(k)), 0.0, 0.0});
  const auto kk = static_cast<std::size_t>(k);
  parallel_for(r.cells.size() * kk, jobs, [&](std::size_t task) {
    auto& cell = r.cells[task / kk];
    const Pipeline p{cell.algorithm, cell.scaler, hp};
    cell.fold_f1[task % kk] = fold_score(ds, r.fold_of_row, static_cast<int>(task % kk), p, seed);
  });
  for (auto& cell : r.cells) mean_std(cell.fold_f1, cell.mean_f1, cell.std_f1);
  return r;
}

LearningCurveReport learning_curve(const LabeledDataset& train, const LabeledDataset& test,
                                   std::span<const std::size_t> sizes, const Pipeline& p,
                                   std::uint64_t seed, int jobs) {
  if (sizes.empty()) throw Error(Errc::InvalidArgument, "no learning-curve sizes given");
  for (std::size_t i = 0; i < sizes.size(); ++i)
    if (sizes[i] == 0 || (i && sizes[i] <= sizes[i - 1]))
      throw Error(Errc::InvalidArgument, "learning-curve sizes must be positive and ascending");
  // Validates the largest size up front, so errors do not depend on jobs.
  subsample_indices(train, sizes.back(), seed);
  LearningCurveReport r;
  r.seed = seed;
  r.pipeline = p;
  r.points.resize(sizes.size());
  parallel_for(sizes.size(), jobs, [&](std::size_t i) {
    const auto sub = subsample_per_class(train, sizes[i], seed);
    r.points[i] = {sizes[i], test_f1(fit(p, sub, seed), test)};
  });
  return r;
}

std::size_t choose_grid_cell(std::span<const GridCell> cells) {
  if (cells.empty()) throw Error(Errc::InvalidArgument, "empty grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const auto& a = cells[i];
    const auto& b = cells[best];
    const bool better =
        a.test_f1 > b.test_f1 ||
        (a.test_f1 == b.test_f1 &&
         (a.c < b.c || (a.c == b.c && a.loss == LossKind::Hinge && b.loss != LossKind::Hinge)));
    if (better) best = i;
  }
  return best;
}

GridSearchReport grid_search(const LabeledDataset& train, const LabeledDataset& test,
                             std::span<const LossKind> losses, std::span<const double> cs, int k,
                             ScalerKind scaler, std::uint64_t seed, const SolverOptions& solver,
                             int jobs) {
  GridSearchReport r;
  r.k = k;
  r.seed = seed;
  r.scaler = scaler;
  const auto folds = stratified_folds(train, k, seed);
  for (auto loss : losses)
    for (double c : cs) {
      if (!(c > 0.0)) throw Error(Errc::InvalidArgument, "C must be > 0");
      r.cells.push_back({loss, c});
    }
  // Per cell: k fold fits plus one fit on all of train (slot k).
  const auto per_cell = static_cast<std::size_t>(k) + 1;
  std::vector<double> scores(r.cells.size() * per_cell, 0.0);
  parallel_for(scores.size(), jobs, [&](std::size_t task) {
    const auto& cell = r.cells[task / per_cell];
    Pipeline p{Algorithm::LinearSvm, scaler, {}};
    p.hp.c = cell.c;
    p.hp.loss = cell.loss;
    p.hp.solver = solver;
    const auto slot = static_cast<int>(task % per_cell);
    scores[task] = slot == k ? test_f1(fit(p, train, seed), test)
                             : fold_score(train, folds, slot, p, seed);
  });
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const std::vector<double> cv(scores.begin() + static_cast<std::ptrdiff_t>(i * per_cell),
                                 scores.begin() + static_cast<std::ptrdiff_t>(i * per_cell + per_cell - 1));
    mean_std(cv, r.cells[i].cv_mean_f1, r.cells[i].cv_std_f1);
    r.cells[i].test_f1 = scores[i * per_cell + per_cell - 1];
  }
  r.chosen = choose_grid_cell(r.cells);
  return r;
}

std::vector<double> timing_report(std::span<const Model* const> models, const Matrix& x,
                                  int repeats) {
  if (repeats < 3) throw Error(Errc::InvalidArgument, "timing needs at least 3 repeats");
  std::vector<double> out;
  for (const Model* m : models) {
    std::vector<double> seconds;
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto pred = predict(*m, x);
      const auto t1 = std::chrono::steady_clock::now();
      seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
      (void)pred;
    }
    out.push_back(median(seconds));
  }
  return out;
}

}  // namespace spectrasort
