#pragma once

#include <span>
#include <string>
#include <vector>

#include "spectrasort/error.hpp"
#include "spectrasort/learn.hpp"

namespace spectrasort::detail {

/// Training rows in canonical order, scaled with a scaler fitted on them.
struct PreparedData {
  Matrix x;
  std::vector<int> labels;
  ScalerParams scaler;
};

PreparedData prepare(const LabeledDataset& train, ScalerKind scaler);

/// SingleClass unless at least two labels are present.
void require_two_classes(const LabeledDataset& train);

void check_model_width(std::size_t expected, Eigen::Index got);

/// Step size before halvings: eta0 / (1 + t / t0).
inline double scheduled_step(const SolverOptions& o, int t) {
  return o.eta0 / (1.0 + static_cast<double>(t) / o.t0);
}

/// Relative-decrease stopping rule.
struct StallCounter {
  int streak = 0;
  /// Record one accepted step; true once the rule says stop.
  bool update(double before, double after, const SolverOptions& o) {
    const double denom = std::max(std::abs(before), 1e-300);
    streak = (before - after) / denom < o.rel_tol ? streak + 1 : 0;
    return streak >= o.patience;
  }
};

/// Row-wise softmax in place (max-shifted).
void softmax_rows(Matrix& scores);

}  // namespace spectrasort::detail
