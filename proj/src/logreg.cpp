#include <cmath>

#include "learn_common.hpp"
#include "spectrasort/learn.hpp"

namespace spectrasort {

namespace {

/// Mean cross-entropy of row-wise softmax(scores) against labels.
double mean_cross_entropy(const Matrix& scores, std::span<const int> labels) {
  double sum = 0.0;
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const auto row = scores.row(r);
    const double mx = row.maxCoeff();
    const double lse = mx + std::log((row.array() - mx).exp().sum());
    sum += lse - row[labels[static_cast<std::size_t>(r)]];
  }
  return scores.rows() == 0 ? 0.0 : sum / static_cast<double>(scores.rows());
}

Matrix logits(const Matrix& x, const Matrix& w, const Vector& b) {
  Matrix s = x * w.transpose();
  s.rowwise() += b.transpose();
  return s;
}

void gradient_from_logits(const Matrix& x, std::span<const int> labels, const Matrix& w,
                          const Matrix& scores, double lambda, Matrix& grad_w, Vector& grad_b) {
  Matrix p = scores;
  detail::softmax_rows(p);
  for (Eigen::Index r = 0; r < p.rows(); ++r) p(r, labels[static_cast<std::size_t>(r)]) -= 1.0;
  p /= static_cast<double>(x.rows());
  grad_w.noalias() = p.transpose() * x;
  grad_w += lambda * w;
  grad_b = p.colwise().sum().transpose();
}

void check_problem(const Matrix& x, std::span<const int> labels, const Matrix& w, const Vector& b) {
  if (static_cast<std::size_t>(x.rows()) != labels.size() || w.cols() != x.cols() ||
      w.rows() != b.size() || x.rows() == 0)
    throw Error(Errc::DimensionMismatch, "logistic regression problem shapes disagree");
}

}  // namespace

double logreg_objective(const Matrix& x, std::span<const int> labels, const Matrix& w,
                        const Vector& b, double lambda) {
  check_problem(x, labels, w, b);
  return mean_cross_entropy(logits(x, w, b), labels) + 0.5 * lambda * w.squaredNorm();
}

void logreg_gradient(const Matrix& x, std::span<const int> labels, const Matrix& w,
                     const Vector& b, double lambda, Matrix& grad_w, Vector& grad_b) {
  check_problem(x, labels, w, b);
  gradient_from_logits(x, labels, w, logits(x, w, b), lambda, grad_w, grad_b);
}

LogRegModel train_logreg(const LabeledDataset& train, double lambda, ScalerKind scaler,
                         std::uint64_t /*seed*/, const SolverOptions& opts) {
  if (!(lambda >= 0.0)) throw Error(Errc::InvalidArgument, "lambda must be >= 0");
  detail::require_two_classes(train);
  auto data = detail::prepare(train, scaler);
  const Matrix& x = data.x;
  const auto k = static_cast<Eigen::Index>(train.n_classes());

  LogRegModel m;
  m.weights = Matrix::Zero(k, x.cols());
  m.bias = Vector::Zero(k);
  m.lambda = lambda;
  m.class_names = train.class_names;
  m.scaler = std::move(data.scaler);
  m.grid = train.grid;

  Matrix scores = Matrix::Zero(x.rows(), k);
  double objective = mean_cross_entropy(scores, data.labels);
  double step_scale = 1.0;
  int iterations = 0;
  bool converged = false;
  detail::StallCounter stall;
  std::vector<double> trace{objective};

  Matrix grad_w, direction, trial_scores, trial_w;
  Vector grad_b;
  while (iterations < opts.max_iter) {
    gradient_from_logits(x, data.labels, m.weights, scores, lambda, grad_w, grad_b);
    direction.noalias() = x * grad_w.transpose();
    direction.rowwise() += grad_b.transpose();
    const double base = detail::scheduled_step(opts, iterations);
    bool accepted = false;
    double trial_obj = 0.0;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      const double eta = step_scale * base;
      trial_w = m.weights - eta * grad_w;
      trial_scores = scores - eta * direction;
      trial_obj = mean_cross_entropy(trial_scores, data.labels) + 0.5 * lambda * trial_w.squaredNorm();
      if (trial_obj <= objective) {
        m.weights.swap(trial_w);
        m.bias -= eta * grad_b;
        scores.swap(trial_scores);
        accepted = true;
        break;
      }
      step_scale *= 0.5;
    }
    if (!accepted) {
      converged = true;
      break;
    }
    const bool stop = stall.update(objective, trial_obj, opts);
    objective = trial_obj;
    trace.push_back(objective);
    ++iterations;
    if (stop) {
      converged = true;
      break;
    }
  }
  m.solver_report.iterations = {iterations};
  m.solver_report.final_objective = {objective};
  m.solver_report.converged = {converged};
  m.solver_report.objective_trace = {std::move(trace)};
  return m;
}

}  // namespace spectrasort
