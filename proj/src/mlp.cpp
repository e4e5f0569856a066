#include <cmath>
#include <numeric>

#include "learn_common.hpp"
#include "spectrasort/learn.hpp"
#include "spectrasort/rng.hpp"

namespace spectrasort {

namespace {

struct Forward {
  Matrix pre;     // hidden pre-activations
  Matrix hidden;  // ReLU output
  Matrix prob;    // softmax output
};

Forward forward(const MlpModel& net, const Matrix& x) {
  Forward f;
  f.pre = x * net.w1.transpose();
  f.pre.rowwise() += net.b1.transpose();
  f.hidden = f.pre.cwiseMax(0.0);
  f.prob = f.hidden * net.w2.transpose();
  f.prob.rowwise() += net.b2.transpose();
  detail::softmax_rows(f.prob);
  return f;
}

double cross_entropy(const Matrix& prob, std::span<const int> labels) {
  double sum = 0.0;
  for (Eigen::Index r = 0; r < prob.rows(); ++r)
    sum -= std::log(std::max(prob(r, labels[static_cast<std::size_t>(r)]), 1e-300));
  return sum / static_cast<double>(prob.rows());
}

MlpGradients backward(const MlpModel& net, const Matrix& x, std::span<const int> labels,
                      const Forward& f) {
  const double n = static_cast<double>(x.rows());
  Matrix d_out = f.prob;
  for (Eigen::Index r = 0; r < d_out.rows(); ++r) d_out(r, labels[static_cast<std::size_t>(r)]) -= 1.0;
  d_out /= n;
  MlpGradients g;
  g.w2.noalias() = d_out.transpose() * f.hidden;
  g.b2 = d_out.colwise().sum().transpose();
  Matrix d_hidden = d_out * net.w2;
  d_hidden = d_hidden.cwiseProduct((f.pre.array() > 0.0).cast<double>().matrix());
  g.w1.noalias() = d_hidden.transpose() * x;
  g.b1 = d_hidden.colwise().sum().transpose();
  return g;
}

void check_problem(const MlpModel& net, const Matrix& x, std::span<const int> labels) {
  if (x.cols() != net.w1.cols() || static_cast<std::size_t>(x.rows()) != labels.size() ||
      x.rows() == 0)
    throw Error(Errc::DimensionMismatch, "MLP problem shapes disagree");
}

}  // namespace

double mlp_loss(const MlpModel& net, const Matrix& x, std::span<const int> labels) {
  check_problem(net, x, labels);
  return cross_entropy(forward(net, x).prob, labels);
}

MlpGradients mlp_gradient(const MlpModel& net, const Matrix& x, std::span<const int> labels) {
  check_problem(net, x, labels);
  return backward(net, x, labels, forward(net, x));
}

MlpModel train_mlp(const LabeledDataset& train, const MlpOptions& opts, ScalerKind scaler,
                   std::uint64_t seed) {
  if (opts.hidden_units < 1 || opts.epochs < 1 || opts.batch_size < 1 ||
      !(opts.learning_rate > 0.0))
    throw Error(Errc::InvalidArgument,
                "MLP needs hidden_units >= 1, epochs >= 1, batch_size >= 1, learning_rate > 0");
  detail::require_two_classes(train);
  auto data = detail::prepare(train, scaler);
  const Matrix& x = data.x;
  const auto d = x.cols();
  const auto h = static_cast<Eigen::Index>(opts.hidden_units);
  const auto k = static_cast<Eigen::Index>(train.n_classes());

  MlpModel net;
  net.class_names = train.class_names;
  net.scaler = std::move(data.scaler);
  net.grid = train.grid;
  RngStream init(seed, "mlp-init");
  const auto uniform_init = [&](Eigen::Index rows, Eigen::Index cols) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    Matrix w(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = init.uniform(-bound, bound);
    return w;
  };
  net.w1 = uniform_init(h, d);
  net.b1 = Vector::Zero(h);
  net.w2 = uniform_init(k, h);
  net.b2 = Vector::Zero(k);
  net.training_report.initial_loss = cross_entropy(forward(net, x).prob, data.labels);

  const auto n = static_cast<std::size_t>(x.rows());
  const auto batch = static_cast<std::size_t>(opts.batch_size);
  std::vector<std::size_t> order(n);
  Matrix xb;
  std::vector<int> yb;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream shuffle(seed, "mlp-shuffle", {static_cast<std::uint64_t>(epoch)});
    for (std::size_t i = 0; i + 1 < n; ++i) std::swap(order[i], order[i + shuffle.below(n - i)]);
    for (std::size_t start = 0; start < n; start += batch) {
      const auto end = std::min(start + batch, n);
      xb.resize(static_cast<Eigen::Index>(end - start), d);
      yb.resize(end - start);
      for (std::size_t i = start; i < end; ++i) {
        xb.row(static_cast<Eigen::Index>(i - start)) = x.row(static_cast<Eigen::Index>(order[i]));
        yb[i - start] = data.labels[order[i]];
      }
      const auto g = backward(net, xb, yb, forward(net, xb));
      net.w1 -= opts.learning_rate * g.w1;
      net.b1 -= opts.learning_rate * g.b1;
      net.w2 -= opts.learning_rate * g.w2;
      net.b2 -= opts.learning_rate * g.b2;
    }
  }
  net.training_report.epochs = opts.epochs;
  net.training_report.final_loss = cross_entropy(forward(net, x).prob, data.labels);
  return net;
}

}  // namespace spectrasort
