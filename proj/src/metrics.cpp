#include <numeric>

#include "spectrasort/error.hpp"
#include "spectrasort/eval.hpp"

namespace spectrasort {

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::row_sum(std::size_t t) const {
  std::int64_t s = 0;
  for (std::size_t p = 0; p < n_classes; ++p) s += at(t, p);
  return s;
}

std::int64_t ConfusionMatrix::col_sum(std::size_t p) const {
  std::int64_t s = 0;
  for (std::size_t t = 0; t < n_classes; ++t) s += at(t, p);
  return s;
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t n_classes, std::vector<std::string> class_names) {
  if (y_true.size() != y_pred.size())
    throw Error(Errc::InvalidArgument, "label vectors differ in length");
  if (!class_names.empty() && class_names.size() != n_classes)
    throw Error(Errc::InvalidArgument, "class name count differs from n_classes");
  ConfusionMatrix cm{n_classes, std::vector<std::int64_t>(n_classes * n_classes, 0),
                     std::move(class_names)};
  const auto n = static_cast<int>(n_classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] < 0 || y_true[i] >= n || y_pred[i] < 0 || y_pred[i] >= n)
      throw Error(Errc::LabelOutOfRange, "label at position " + std::to_string(i) +
                                             " outside [0, " + std::to_string(n_classes) + ")");
    ++cm.at(static_cast<std::size_t>(y_true[i]), static_cast<std::size_t>(y_pred[i]));
  }
  return cm;
}

std::vector<double> per_class_f1(const ConfusionMatrix& cm) {
  std::vector<double> f1(cm.n_classes, 0.0);
  for (std::size_t c = 0; c < cm.n_classes; ++c) {
    const auto tp = static_cast<double>(cm.at(c, c));
    const auto predicted = static_cast<double>(cm.col_sum(c));
    const auto actual = static_cast<double>(cm.row_sum(c));
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = actual > 0 ? tp / actual : 0.0;
    f1[c] = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  return f1;
}

double macro_f1(const ConfusionMatrix& cm) {
  if (cm.n_classes == 0) return 0.0;
  const auto f1 = per_class_f1(cm);
  return std::accumulate(f1.begin(), f1.end(), 0.0) / static_cast<double>(f1.size());
}

ConfusionMatrix collapse_to_clusters(const ConfusionMatrix& cm, const AlloyTaxonomy& taxonomy) {
  if (cm.class_names.size() != cm.n_classes)
    throw Error(Errc::UnmappedClass, "confusion matrix carries no class names");
  std::vector<std::size_t> cluster(cm.n_classes);
  for (std::size_t c = 0; c < cm.n_classes; ++c) {
    const auto it = taxonomy.cluster_of.find(cm.class_names[c]);
    if (it == taxonomy.cluster_of.end())
      throw Error(Errc::UnmappedClass, "alloy '" + cm.class_names[c] + "' has no cluster");
    cluster[c] = it->second;
  }
  const auto k = taxonomy.cluster_names.size();
  ConfusionMatrix out{k, std::vector<std::int64_t>(k * k, 0), taxonomy.cluster_names};
  for (std::size_t t = 0; t < cm.n_classes; ++t)
    for (std::size_t p = 0; p < cm.n_classes; ++p) out.at(cluster[t], cluster[p]) += cm.at(t, p);
  return out;
}

double cluster_f1(const ConfusionMatrix& cm, const AlloyTaxonomy& taxonomy) {
  return macro_f1(collapse_to_clusters(cm, taxonomy));
}

UnambiguousReport unambiguous_report(const LinearModel& m, const Matrix& x,
                                     std::span<const int> y) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw Error(Errc::DimensionMismatch, "row count differs from label count");
  const Matrix scores = decision_values(m, x);
  UnambiguousReport r;
  r.n_total = y.size();
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    int positive = 0;
    int which = -1;
    for (Eigen::Index c = 0; c < scores.cols(); ++c)
      if (scores(i, c) > 0.0) {
        ++positive;
        which = static_cast<int>(c);
      }
    if (positive != 1) continue;
    ++r.n_clear;
    if (which == y[static_cast<std::size_t>(i)]) ++r.n_clear_correct;
  }
  r.fraction_unambiguous =
      r.n_total ? static_cast<double>(r.n_clear) / static_cast<double>(r.n_total) : 0.0;
  if (r.n_clear)
    r.accuracy_on_unambiguous =
        static_cast<double>(r.n_clear_correct) / static_cast<double>(r.n_clear);
  return r;
}

EvaluationReport evaluate(const Model& m, const LabeledDataset& test,
                          const AlloyTaxonomy* taxonomy) {
  if (class_names(m) != test.class_names)
    throw Error(Errc::ClassNameMismatch, "model and test data use different class names");
  const auto pred = predict(m, test.rows);
  EvaluationReport r;
  r.confusion = confusion_matrix(test.labels, pred, test.n_classes(), test.class_names);
  r.per_class_f1 = per_class_f1(r.confusion);
  r.macro_f1 = macro_f1(r.confusion);
  if (taxonomy) r.cluster_f1 = cluster_f1(r.confusion, *taxonomy);
  if (const auto* lin = std::get_if<LinearModel>(&m))
    r.coverage = unambiguous_report(*lin, test.rows, test.labels);
  return r;
}

}  // namespace spectrasort
