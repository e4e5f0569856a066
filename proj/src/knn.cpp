#include <algorithm>
#include <cmath>

#include "learn_common.hpp"
#include "spectrasort/learn.hpp"

namespace spectrasort {

namespace {

constexpr Eigen::Index kQueryBlock = 16;

// Fixed accumulation order: the value for a pair never depends on where
// either row sits in memory, so results are permutation invariant.
double squared_distance(const double* a, const double* b, Eigen::Index d) {
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  Eigen::Index j = 0;
  for (; j + 8 <= d; j += 8)
    for (int u = 0; u < 8; ++u) {
      const double t = a[j + u] - b[j + u];
      acc[u] += t * t;
    }
  double tail = 0.0;
  for (; j < d; ++j) {
    const double t = a[j] - b[j];
    tail += t * t;
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

struct Neighbour {
  double dist;
  int label;
};

struct KnnDecision {
  int label;
  std::vector<int> votes;
};

KnnDecision decide(std::vector<Neighbour>& cand, int k, std::size_t n_classes) {
  const auto by_distance = [](const Neighbour& a, const Neighbour& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.label < b.label;
  };
  std::partial_sort(cand.begin(), cand.begin() + k, cand.end(), by_distance);
  KnnDecision out{0, std::vector<int>(n_classes, 0)};
  std::vector<double> dist_sum(n_classes, 0.0);
  for (int i = 0; i < k; ++i) {
    const auto c = static_cast<std::size_t>(cand[static_cast<std::size_t>(i)].label);
    ++out.votes[c];
    dist_sum[c] += std::sqrt(cand[static_cast<std::size_t>(i)].dist);
  }
  for (std::size_t c = 1; c < n_classes; ++c) {
    const auto best = static_cast<std::size_t>(out.label);
    if (out.votes[c] > out.votes[best] ||
        (out.votes[c] == out.votes[best] && out.votes[c] > 0 && dist_sum[c] < dist_sum[best]))
      out.label = static_cast<int>(c);
  }
  return out;
}

std::vector<KnnDecision> knn_decide(const KnnModel& m, const Matrix& x) {
  detail::check_model_width(static_cast<std::size_t>(m.train_rows.cols()), x.cols());
  const Matrix q = transform(m.scaler, x);
  const auto n_train = m.train_rows.rows();
  const auto d = q.cols();
  std::vector<KnnDecision> out;
  out.reserve(static_cast<std::size_t>(q.rows()));
  std::vector<std::vector<Neighbour>> cand(kQueryBlock, std::vector<Neighbour>(static_cast<std::size_t>(n_train)));
  for (Eigen::Index start = 0; start < q.rows(); start += kQueryBlock) {
    const auto block = std::min(kQueryBlock, q.rows() - start);
    for (Eigen::Index j = 0; j < n_train; ++j) {
      const double* row = m.train_rows.row(j).data();
      const int label = m.train_labels[static_cast<std::size_t>(j)];
      for (Eigen::Index b = 0; b < block; ++b)
        cand[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)] = {
            squared_distance(q.row(start + b).data(), row, d), label};
    }
    for (Eigen::Index b = 0; b < block; ++b)
      out.push_back(decide(cand[static_cast<std::size_t>(b)], m.k, m.class_names.size()));
  }
  return out;
}

}  // namespace

KnnModel train_knn(const LabeledDataset& train, int k, ScalerKind scaler) {
  if (k < 1 || k % 2 == 0)
    throw Error(Errc::BadK, "k must be a positive odd integer, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > train.size())
    throw Error(Errc::BadK, "k = " + std::to_string(k) + " exceeds " +
                                std::to_string(train.size()) + " training rows");
  auto data = detail::prepare(train, scaler);
  KnnModel m;
  m.train_rows = std::move(data.x);
  m.train_labels = std::move(data.labels);
  m.k = k;
  m.class_names = train.class_names;
  m.scaler = std::move(data.scaler);
  m.grid = train.grid;
  return m;
}

std::vector<int> predict(const KnnModel& m, const Matrix& x) {
  std::vector<int> out;
  for (const auto& d : knn_decide(m, x)) out.push_back(d.label);
  return out;
}

Matrix knn_votes(const KnnModel& m, const Matrix& x) {
  const auto decisions = knn_decide(m, x);
  Matrix votes(x.rows(), static_cast<Eigen::Index>(m.class_names.size()));
  for (std::size_t r = 0; r < decisions.size(); ++r)
    for (std::size_t c = 0; c < m.class_names.size(); ++c)
      votes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = decisions[r].votes[c];
  return votes;
}

}  // namespace spectrasort
