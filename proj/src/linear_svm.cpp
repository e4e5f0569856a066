#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "learn_common.hpp"
#include "spectrasort/learn.hpp"
#include "spectrasort/rng.hpp"

namespace spectrasort {

namespace {

using ColMatrix = Eigen::MatrixXd;

double loss_value(double t, LossKind loss) {
  if (t <= 0.0) return 0.0;
  return loss == LossKind::Hinge ? t : t * t;
}

double loss_slope(double t, LossKind loss) {
  if (t <= 0.0) return 0.0;
  return loss == LossKind::Hinge ? 1.0 : 2.0 * t;
}

double sign_of(int label, std::size_t cls) { return label == static_cast<int>(cls) ? 1.0 : -1.0; }

/// C * sum_i loss(1 - y_i s_i) for one class column of scores.
double data_term(const Eigen::Ref<const Eigen::VectorXd>& scores, std::span<const int> labels,
                 std::size_t cls, double c, LossKind loss) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    sum += loss_value(1.0 - sign_of(labels[static_cast<std::size_t>(i)], cls) * scores[i], loss);
  return c * sum;
}

ColMatrix scores_of(const Matrix& x, const Matrix& w, const Vector& b) {
  ColMatrix s = x * w.transpose();
  s.rowwise() += b.transpose();
  return s;
}

/// Gradient for the classes in `classes`, given their score columns.
/// Row j of grad_w / entry j of grad_b belongs to classes[j].
void gradient_from_scores(const Matrix& x, std::span<const int> labels, const Matrix& w,
                          const ColMatrix& scores, std::span<const std::size_t> classes, double c,
                          LossKind loss, Matrix& grad_w, Vector& grad_b) {
  const auto n = x.rows();
  const auto k = static_cast<Eigen::Index>(classes.size());
  ColMatrix coef(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto cls = classes[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const double y = sign_of(labels[static_cast<std::size_t>(i)], cls);
      coef(i, j) = -c * loss_slope(1.0 - y * scores(i, static_cast<Eigen::Index>(cls)), loss) * y;
    }
  }
  grad_w.resize(k, x.cols());
  grad_w.noalias() = coef.transpose() * x;
  for (Eigen::Index j = 0; j < k; ++j)
    grad_w.row(j) += w.row(static_cast<Eigen::Index>(classes[static_cast<std::size_t>(j)]));
  grad_b = coef.colwise().sum().transpose();
}

void check_problem(const Matrix& x, std::span<const int> labels, const Matrix& w, const Vector& b) {
  if (static_cast<std::size_t>(x.rows()) != labels.size() || w.cols() != x.cols() ||
      w.rows() != b.size())
    throw Error(Errc::DimensionMismatch, "SVM problem shapes disagree");
}

}  // namespace

Vector svm_objective(const Matrix& x, std::span<const int> labels, const Matrix& w,
                     const Vector& b, double c, LossKind loss) {
  check_problem(x, labels, w, b);
  const ColMatrix s = scores_of(x, w, b);
  Vector out(w.rows());
  for (Eigen::Index k = 0; k < w.rows(); ++k)
    out[k] = 0.5 * w.row(k).squaredNorm() +
             data_term(s.col(k), labels, static_cast<std::size_t>(k), c, loss);
  return out;
}

void svm_gradient(const Matrix& x, std::span<const int> labels, const Matrix& w, const Vector& b,
                  double c, LossKind loss, Matrix& grad_w, Vector& grad_b) {
  check_problem(x, labels, w, b);
  const ColMatrix s = scores_of(x, w, b);
  std::vector<std::size_t> classes(static_cast<std::size_t>(w.rows()));
  for (std::size_t k = 0; k < classes.size(); ++k) classes[k] = k;
  gradient_from_scores(x, labels, w, s, classes, c, loss, grad_w, grad_b);
}

LinearModel train_linear_svm(const LabeledDataset& train, double c, LossKind loss,
                             ScalerKind scaler, std::uint64_t seed, const SolverOptions& opts) {
  if (!(c > 0.0)) throw Error(Errc::InvalidArgument, "C must be > 0");
  if (!(opts.intercept_scaling > 0.0))
    throw Error(Errc::InvalidArgument, "intercept_scaling must be > 0");
  detail::require_two_classes(train);
  auto data = detail::prepare(train, scaler);
  const Matrix& x = data.x;
  const auto& labels = data.labels;
  const auto n = x.rows();
  const auto d = x.cols();
  const auto n_classes = train.n_classes();
  const auto kc = static_cast<Eigen::Index>(n_classes);
  const double scale_b = opts.intercept_scaling;

  LinearModel m;
  m.C = c;
  m.loss = loss;
  m.class_names = train.class_names;
  m.scaler = std::move(data.scaler);
  m.grid = train.grid;

  // Dual box [0, upper] and diagonal shift of the two losses.
  const double upper = loss == LossKind::Hinge ? c : std::numeric_limits<double>::infinity();
  const double diag = loss == LossKind::Hinge ? 0.0 : 0.5 / c;
  Eigen::VectorXd q_ii(n);
  for (Eigen::Index i = 0; i < n; ++i) q_ii[i] = x.row(i).squaredNorm() + scale_b * scale_b + diag;

  // Working iterate (w, w_b with b = scale_b * w_b) and the kept best one.
  Matrix w = Matrix::Zero(kc, d);
  Eigen::VectorXd wb = Eigen::VectorXd::Zero(kc);
  ColMatrix alpha = ColMatrix::Zero(n, kc);
  m.weights = Matrix::Zero(kc, d);
  m.bias = Vector::Zero(kc);

  auto& report = m.solver_report;
  report.iterations.assign(n_classes, 0);
  report.converged.assign(n_classes, false);
  report.objective_trace.assign(n_classes, {});
  std::vector<double> best(n_classes);
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < n_classes; ++k) {
    best[k] = data_term(ColMatrix::Zero(n, 1).col(0), labels, k, c, loss);
    report.objective_trace[k].push_back(best[k]);
    active.push_back(k);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::vector<double> max_pg(n_classes);
  ColMatrix scores;
  for (int epoch = 0; !active.empty(); ++epoch) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    RngStream rng(seed, "svm-shuffle", {static_cast<std::uint64_t>(epoch)});
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
      std::swap(order[i], order[i + rng.below(order.size() - i)]);
    std::fill(max_pg.begin(), max_pg.end(), 0.0);

    for (const auto i : order) {
      const auto xi = x.row(i);
      const int label = labels[static_cast<std::size_t>(i)];
      for (const auto k : active) {
        const auto kk = static_cast<Eigen::Index>(k);
        const double y = sign_of(label, k);
        double& a = alpha(i, kk);
        const double g = y * (w.row(kk).dot(xi) + scale_b * wb[kk]) - 1.0 + diag * a;
        double pg = g;
        if (a <= 0.0) pg = std::min(g, 0.0);
        else if (a >= upper) pg = std::max(g, 0.0);
        max_pg[k] = std::max(max_pg[k], std::abs(pg));
        if (pg == 0.0) continue;
        const double next = std::clamp(a - g / q_ii[i], 0.0, upper);
        const double delta = (next - a) * y;
        a = next;
        w.row(kk) += delta * xi;
        wb[kk] += delta * scale_b;
      }
    }

    // Primal objective of the new iterate; keep it only if it is no worse.
    Matrix wa(static_cast<Eigen::Index>(active.size()), d);
    Vector ba(static_cast<Eigen::Index>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j) {
      wa.row(static_cast<Eigen::Index>(j)) = w.row(static_cast<Eigen::Index>(active[j]));
      ba[static_cast<Eigen::Index>(j)] = scale_b * wb[static_cast<Eigen::Index>(active[j])];
    }
    scores = scores_of(x, wa, ba);
    std::vector<std::size_t> still_active;
    for (std::size_t j = 0; j < active.size(); ++j) {
      const auto k = active[j];
      const auto kk = static_cast<Eigen::Index>(k);
      const auto jj = static_cast<Eigen::Index>(j);
      const double obj =
          0.5 * wa.row(jj).squaredNorm() + data_term(scores.col(jj), labels, k, c, loss);
      if (obj <= best[k]) {
        best[k] = obj;
        m.weights.row(kk) = wa.row(jj);
        m.bias[kk] = ba[jj];
      }
      report.objective_trace[k].push_back(best[k]);
      ++report.iterations[k];
      // No stall rule: the primal of the iterates need not decrease, and a
      // slow dual at large C is not a converged one.
      if (max_pg[k] <= opts.pg_tol) report.converged[k] = true;
      else if (report.iterations[k] < opts.max_iter) still_active.push_back(k);
    }
    active = std::move(still_active);
  }
  report.final_objective = best;
  return m;
}

Vector decision_values(const LinearModel& m, const Eigen::Ref<const Vector>& x) {
  detail::check_model_width(static_cast<std::size_t>(m.weights.cols()), x.size());
  const Vector scaled = transform_row(m.scaler, x);
  return m.weights * scaled + m.bias;
}

Matrix decision_values(const LinearModel& m, const Matrix& x) {
  detail::check_model_width(static_cast<std::size_t>(m.weights.cols()), x.cols());
  const Matrix scaled = transform(m.scaler, x);
  Matrix s = scaled * m.weights.transpose();
  s.rowwise() += m.bias.transpose();
  return s;
}

}  // namespace spectrasort
