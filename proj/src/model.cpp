#include <algorithm>
#include <numeric>

#include "learn_common.hpp"
#include "spectrasort/learn.hpp"

namespace spectrasort {

std::string_view to_string(LossKind k) {
  return k == LossKind::Hinge ? "hinge" : "squared-hinge";
}

std::optional<LossKind> loss_from_string(std::string_view s) {
  if (s == "hinge") return LossKind::Hinge;
  if (s == "squared-hinge" || s == "squared_hinge") return LossKind::SquaredHinge;
  return std::nullopt;
}

bool SolverReport::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool b) { return b; });
}

std::vector<std::size_t> canonical_row_order(const Matrix& rows, std::span<const int> labels) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (labels[a] != labels[b]) return labels[a] < labels[b];
    const auto ra = static_cast<Eigen::Index>(a);
    const auto rb = static_cast<Eigen::Index>(b);
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      const double va = rows(ra, c);
      const double vb = rows(rb, c);
      if (va != vb) return va < vb;
    }
    return false;
  });
  return order;
}

std::size_t count_present_classes(std::span<const int> labels) {
  std::vector<int> seen(labels.begin(), labels.end());
  std::sort(seen.begin(), seen.end());
  return static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

namespace detail {

PreparedData prepare(const LabeledDataset& train, ScalerKind scaler) {
  PreparedData p;
  const auto order = canonical_row_order(train.rows, train.labels);
  p.x.resize(train.rows.rows(), train.rows.cols());
  p.labels.resize(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    p.x.row(static_cast<Eigen::Index>(r)) = train.rows.row(static_cast<Eigen::Index>(order[r]));
    p.labels[r] = train.labels[order[r]];
  }
  p.scaler = fit_scaler(scaler, p.x);
  transform_in_place(p.scaler, p.x);
  return p;
}

void require_two_classes(const LabeledDataset& train) {
  if (count_present_classes(train.labels) < 2)
    throw Error(Errc::SingleClass, "training data must contain at least two classes");
}

void check_model_width(std::size_t expected, Eigen::Index got) {
  if (static_cast<std::size_t>(got) != expected)
    throw Error(Errc::DimensionMismatch, "model expects " + std::to_string(expected) +
                                             " features, input has " + std::to_string(got));
}

void softmax_rows(Matrix& scores) {
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    auto row = scores.row(r);
    const double mx = row.maxCoeff();
    row = (row.array() - mx).exp();
    row /= row.sum();
  }
}

}  // namespace detail

int argmax_lowest(const Eigen::Ref<const Vector>& scores) {
  int best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = static_cast<int>(i);
  return best;
}

namespace {

std::vector<int> argmax_rows(const Matrix& s) {
  std::vector<int> out(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index r = 0; r < s.rows(); ++r) out[static_cast<std::size_t>(r)] = argmax_lowest(s.row(r).transpose());
  return out;
}

Matrix logreg_probabilities(const LogRegModel& m, const Matrix& x) {
  detail::check_model_width(static_cast<std::size_t>(m.weights.cols()), x.cols());
  const Matrix scaled = transform(m.scaler, x);
  Matrix s = scaled * m.weights.transpose();
  s.rowwise() += m.bias.transpose();
  detail::softmax_rows(s);
  return s;
}

Matrix mlp_probabilities(const MlpModel& m, const Matrix& x) {
  detail::check_model_width(static_cast<std::size_t>(m.w1.cols()), x.cols());
  const Matrix scaled = transform(m.scaler, x);
  Matrix h = scaled * m.w1.transpose();
  h.rowwise() += m.b1.transpose();
  h = h.cwiseMax(0.0);
  Matrix s = h * m.w2.transpose();
  s.rowwise() += m.b2.transpose();
  detail::softmax_rows(s);
  return s;
}

}  // namespace

Matrix knn_votes(const KnnModel& m, const Matrix& x);

std::vector<int> predict(const LinearModel& m, const Matrix& x) {
  return argmax_rows(decision_values(m, x));
}
std::vector<int> predict(const LogRegModel& m, const Matrix& x) {
  return argmax_rows(logreg_probabilities(m, x));
}
std::vector<int> predict(const MlpModel& m, const Matrix& x) {
  return argmax_rows(mlp_probabilities(m, x));
}

std::vector<int> predict(const Model& m, const Matrix& x) {
  return std::visit([&](const auto& model) { return predict(model, x); }, m);
}

Matrix class_scores(const Model& m, const Matrix& x) {
  return std::visit(
      [&](const auto& model) -> Matrix {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, LinearModel>) return decision_values(model, x);
        else if constexpr (std::is_same_v<T, LogRegModel>) return logreg_probabilities(model, x);
        else if constexpr (std::is_same_v<T, MlpModel>) return mlp_probabilities(model, x);
        else return knn_votes(model, x);
      },
      m);
}

const std::vector<std::string>& class_names(const Model& m) {
  return std::visit([](const auto& model) -> const std::vector<std::string>& { return model.class_names; }, m);
}

const WavelengthGrid& model_grid(const Model& m) {
  return std::visit([](const auto& model) -> const WavelengthGrid& { return model.grid; }, m);
}

std::string_view model_kind(const Model& m) {
  static constexpr std::string_view kinds[] = {"linear-svm", "logreg", "knn", "mlp"};
  return kinds[m.index()];
}

}  // namespace spectrasort
