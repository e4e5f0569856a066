#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spectrasort/learn.hpp"
#include "spectrasort/preprocess.hpp"

namespace spectrasort {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::size_t n_classes = 0;
  std::vector<std::int64_t> counts;  // row-major n x n
  std::vector<std::string> class_names;

  std::int64_t at(std::size_t t, std::size_t p) const { return counts[t * n_classes + p]; }
  std::int64_t& at(std::size_t t, std::size_t p) { return counts[t * n_classes + p]; }
  std::int64_t total() const;
  std::int64_t row_sum(std::size_t t) const;
  std::int64_t col_sum(std::size_t p) const;
};

/// Errors: LabelOutOfRange, InvalidArgument (length mismatch).
ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t n_classes, std::vector<std::string> class_names = {});

/// F1 per class with the zero-division conventions P = 0 when TP+FP = 0,
/// R = 0 when TP+FN = 0, F1 = 0 when P+R = 0.
std::vector<double> per_class_f1(const ConfusionMatrix& cm);
/// Unweighted mean of per_class_f1 over all n_classes.
double macro_f1(const ConfusionMatrix& cm);

/// Sum rows and columns within clusters. Errors: UnmappedClass.
ConfusionMatrix collapse_to_clusters(const ConfusionMatrix& cm, const AlloyTaxonomy& taxonomy);
double cluster_f1(const ConfusionMatrix& cm, const AlloyTaxonomy& taxonomy);

struct UnambiguousReport {
  std::size_t n_total = 0;
  std::size_t n_clear = 0;
  std::size_t n_clear_correct = 0;
  double fraction_unambiguous = 0.0;
  std::optional<double> accuracy_on_unambiguous;  // absent when n_clear == 0
};

/// A row is clearly assigned iff exactly one class score is > 0.
UnambiguousReport unambiguous_report(const LinearModel& m, const Matrix& x,
                                     std::span<const int> y);

struct EvaluationReport {
  ConfusionMatrix confusion;
  std::vector<double> per_class_f1;
  double macro_f1 = 0.0;
  std::optional<double> cluster_f1;
  std::optional<UnambiguousReport> coverage;
  std::optional<double> predict_seconds;
};

/// Predict `test` with `m` and score it. Cluster F1 is filled when a taxonomy
/// is given, coverage when `m` is a LinearModel.
EvaluationReport evaluate(const Model& m, const LabeledDataset& test,
                          const AlloyTaxonomy* taxonomy = nullptr);

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

enum class Algorithm { LinearSvm, LogReg, Knn, Mlp };

std::string_view to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(std::string_view s);

struct Hyperparams {
  double c = 1.0;
  LossKind loss = LossKind::SquaredHinge;
  double lambda = 1e-4;
  int k = 5;
  MlpOptions mlp;
  SolverOptions solver;
};

struct Pipeline {
  Algorithm algorithm = Algorithm::LinearSvm;
  ScalerKind scaler = ScalerKind::Standard;
  Hyperparams hp;
};

Model fit(const Pipeline& p, const LabeledDataset& train, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiments. All are deterministic in (data, seed, hyperparameters) and
// independent of `jobs`.
// ---------------------------------------------------------------------------

/// Stratified fold index per row: each class's rows (in row order) are
/// shuffled with the "cv-shuffle" stream of that class and dealt round-robin,
/// the dealer position carrying over from one class to the next.
/// Errors: InvalidArgument (k < 2), TooFewRows (a present class has < k rows).
std::vector<int> stratified_folds(const LabeledDataset& ds, int k, std::uint64_t seed);

struct CVReport {
  int k = 0;
  std::uint64_t seed = 0;
  Pipeline pipeline;
  std::vector<double> fold_f1;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;  // population
  std::vector<int> fold_of_row;
};

CVReport kfold_cv(const LabeledDataset& ds, int k, const Pipeline& p, std::uint64_t seed,
                  int jobs = 1);
CVReport cv_with_folds(const LabeledDataset& ds, const std::vector<int>& fold_of_row, int k,
                       const Pipeline& p, std::uint64_t seed, int jobs = 1);

struct SweepCell {
  Algorithm algorithm;
  ScalerKind scaler;
  std::vector<double> fold_f1;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;
};

struct SweepReport {
  int k = 0;
  std::uint64_t seed = 0;
  Hyperparams hp;
  std::vector<SweepCell> cells;  // algorithm-major
  std::vector<int> fold_of_row;
};

/// One CV per (algorithm, scaler) cell over a single shared fold assignment.
SweepReport sweep(const LabeledDataset& ds, std::span<const Algorithm> algorithms,
                  std::span<const ScalerKind> scalers, int k, std::uint64_t seed,
                  const Hyperparams& hp = {}, int jobs = 1);

struct CurvePoint {
  std::size_t size_per_class = 0;
  double macro_f1 = 0.0;
};

struct LearningCurveReport {
  std::uint64_t seed = 0;
  Pipeline pipeline;
  std::vector<CurvePoint> points;
};

/// Train on nested per-class subsamples of `train`, score on the fixed
/// `test`. Errors: InvalidArgument (sizes not ascending), InsufficientRows.
LearningCurveReport learning_curve(const LabeledDataset& train, const LabeledDataset& test,
                                   std::span<const std::size_t> sizes, const Pipeline& p,
                                   std::uint64_t seed, int jobs = 1);

struct GridCell {
  LossKind loss;
  double c;
  double cv_mean_f1 = 0.0;
  double cv_std_f1 = 0.0;
  double test_f1 = 0.0;
};

struct GridSearchReport {
  int k = 0;
  std::uint64_t seed = 0;
  ScalerKind scaler = ScalerKind::Standard;
  std::vector<GridCell> cells;  // loss-major, in the given orders
  std::size_t chosen = 0;
};

/// Index of the cell with the highest test F1; ties go to the smaller C,
/// then to Hinge.
std::size_t choose_grid_cell(std::span<const GridCell> cells);

GridSearchReport grid_search(const LabeledDataset& train, const LabeledDataset& test,
                             std::span<const LossKind> losses, std::span<const double> cs, int k,
                             ScalerKind scaler, std::uint64_t seed, const SolverOptions& solver = {},
                             int jobs = 1);

/// Median wall-clock seconds to predict all rows of x, per model, on the
/// calling thread. Errors: InvalidArgument (repeats < 3).
std::vector<double> timing_report(std::span<const Model* const> models, const Matrix& x,
                                  int repeats);

/// Median of the values (mean of the middle two for even counts).
double median(std::vector<double> values);

}  // namespace spectrasort
