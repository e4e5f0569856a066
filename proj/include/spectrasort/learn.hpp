#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spectrasort/features.hpp"
#include "spectrasort/preprocess.hpp"
#include "spectrasort/spectra_io.hpp"
#include "spectrasort/types.hpp"

namespace spectrasort {

enum class LossKind { Hinge, SquaredHinge };

std::string_view to_string(LossKind k);
std::optional<LossKind> loss_from_string(std::string_view s);

/// Solver settings.
///
/// Logistic regression runs full-batch gradient descent: step
/// eta0 / (1 + t / t0), halved (persistently) whenever a trial step would
/// raise the objective.
///
/// The linear SVM runs dual coordinate descent, one pass over the rows (in
/// an order drawn from the "svm-shuffle" stream) per iteration. The
/// intercept enters as an extra constant feature of value
/// intercept_scaling, so the solver works on the homogeneous problem.
/// Iterations stop once every projected dual gradient is within pg_tol of
/// zero, or at max_iter.
///
/// Both record the primal objective after each iteration and keep the best
/// iterate. Logistic regression also stops once the relative decrease stays
/// below rel_tol for `patience` consecutive iterations, or at max_iter.
struct SolverOptions {
  double eta0 = 0.1;
  double t0 = 100.0;
  double rel_tol = 1e-6;
  int patience = 10;
  int max_iter = 2000;
  int max_halvings = 60;
  double pg_tol = 1e-4;
  double intercept_scaling = 1.0;
};

struct SolverReport {
  // One entry per OvR class for the SVM, a single entry for joint solvers.
  std::vector<int> iterations;
  std::vector<double> final_objective;
  std::vector<bool> converged;
  // Objective of the kept iterate after every iteration (index 0 = initial
  // point), so each trace is non-increasing.
  // Kept in memory only; not written to model files.
  std::vector<std::vector<double>> objective_trace;

  bool all_converged() const;
};

struct LinearModel {
  Matrix weights;  // n_classes x d, rows in class_names order
  Vector bias;
  double C = 1.0;
  LossKind loss = LossKind::SquaredHinge;
  std::vector<std::string> class_names;
  ScalerParams scaler;
  WavelengthGrid grid;
  SolverReport solver_report;
};

struct LogRegModel {
  Matrix weights;  // n_classes x d
  Vector bias;
  double lambda = 0.0;
  std::vector<std::string> class_names;
  ScalerParams scaler;
  WavelengthGrid grid;
  SolverReport solver_report;
};

struct KnnModel {
  Matrix train_rows;  // scaled
  std::vector<int> train_labels;
  int k = 5;
  std::vector<std::string> class_names;
  ScalerParams scaler;
  WavelengthGrid grid;
};

struct MlpOptions {
  int hidden_units = 100;
  int epochs = 200;
  double learning_rate = 0.01;
  int batch_size = 32;
};

struct MlpReport {
  int epochs = 0;
  double initial_loss = 0.0;  // mean cross-entropy on the training set
  double final_loss = 0.0;
};

/// d -> hidden (ReLU) -> n_classes (softmax).
struct MlpModel {
  Matrix w1;  // hidden x d
  Vector b1;
  Matrix w2;  // n_classes x hidden
  Vector b2;
  std::vector<std::string> class_names;
  ScalerParams scaler;
  WavelengthGrid grid;
  MlpReport training_report;
};

using Model = std::variant<LinearModel, LogRegModel, KnnModel, MlpModel>;

// ---------------------------------------------------------------------------
// Objectives. Exposed so the analytic gradients can be checked against
// finite differences; the solvers call the same code.
// ---------------------------------------------------------------------------

/// Per-class OvR objective 0.5*|w_c|^2 + C * sum_i loss(1 - y_ic (w_c.x_i + b_c)),
/// y_ic = +1 iff labels[i] == c. X is already scaled.
Vector svm_objective(const Matrix& x, std::span<const int> labels, const Matrix& w,
                     const Vector& b, double c, LossKind loss);
void svm_gradient(const Matrix& x, std::span<const int> labels, const Matrix& w, const Vector& b,
                  double c, LossKind loss, Matrix& grad_w, Vector& grad_b);

/// Mean softmax cross-entropy + 0.5*lambda*|W|^2 (bias unpenalized).
double logreg_objective(const Matrix& x, std::span<const int> labels, const Matrix& w,
                        const Vector& b, double lambda);
void logreg_gradient(const Matrix& x, std::span<const int> labels, const Matrix& w,
                     const Vector& b, double lambda, Matrix& grad_w, Vector& grad_b);

struct MlpGradients {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;
};

/// Mean cross-entropy of the network on scaled rows.
double mlp_loss(const MlpModel& net, const Matrix& x, std::span<const int> labels);
MlpGradients mlp_gradient(const MlpModel& net, const Matrix& x, std::span<const int> labels);

// ---------------------------------------------------------------------------
// Training. Every trainer fits its scaler on `train`, embeds it, and is
// invariant under permutations of the training rows: rows are put in a
// canonical order (by label, then lexicographically by intensities) first.
// ---------------------------------------------------------------------------

/// One-vs-rest linear SVM. Errors: SingleClass, InvalidArgument (C <= 0).
LinearModel train_linear_svm(const LabeledDataset& train, double c, LossKind loss,
                             ScalerKind scaler, std::uint64_t seed,
                             const SolverOptions& opts = {});

/// Multinomial logistic regression. Errors: SingleClass, InvalidArgument.
LogRegModel train_logreg(const LabeledDataset& train, double lambda, ScalerKind scaler,
                         std::uint64_t seed, const SolverOptions& opts = {});

/// Errors: BadK (k even, k < 1, or k > rows).
KnnModel train_knn(const LabeledDataset& train, int k, ScalerKind scaler);

/// Mini-batch SGD with "mlp-init" / "mlp-shuffle" streams. Errors:
/// SingleClass, InvalidArgument.
MlpModel train_mlp(const LabeledDataset& train, const MlpOptions& opts, ScalerKind scaler,
                   std::uint64_t seed);

/// Canonical row order used by the trainers.
std::vector<std::size_t> canonical_row_order(const Matrix& rows, std::span<const int> labels);

/// Number of distinct labels present.
std::size_t count_present_classes(std::span<const int> labels);

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

/// W * scale(x) + b in class order. Errors: DimensionMismatch.
Vector decision_values(const LinearModel& m, const Eigen::Ref<const Vector>& x);
Matrix decision_values(const LinearModel& m, const Matrix& x);

/// Per-class scores: SVM decision values, softmax probabilities for
/// logistic regression and MLP, neighbour vote counts for k-NN.
Matrix class_scores(const Model& m, const Matrix& x);

/// Argmax with ties to the lowest index.
int argmax_lowest(const Eigen::Ref<const Vector>& scores);

/// Linear/logreg/MLP: argmax of scores. k-NN: majority of the k nearest
/// (Euclidean) stored rows; vote ties go to the smaller summed distance,
/// then the lower class index. Errors: DimensionMismatch.
std::vector<int> predict(const Model& m, const Matrix& x);
std::vector<int> predict(const LinearModel& m, const Matrix& x);
std::vector<int> predict(const LogRegModel& m, const Matrix& x);
std::vector<int> predict(const KnnModel& m, const Matrix& x);
std::vector<int> predict(const MlpModel& m, const Matrix& x);

const std::vector<std::string>& class_names(const Model& m);
const WavelengthGrid& model_grid(const Model& m);
std::string_view model_kind(const Model& m);

// ---------------------------------------------------------------------------
// Persistence: see docs/model_format.md.
// ---------------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

void save_model(const Model& m, std::ostream& out);
void save_model_file(const Model& m, const std::string& path);
/// Errors: CorruptModel (bad magic, truncation, checksum mismatch, malformed
/// fields), VersionUnsupported.
Model load_model(std::istream& in);
Model load_model_file(const std::string& path);

}  // namespace spectrasort
