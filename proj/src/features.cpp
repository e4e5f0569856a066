#include "spectrasort/features.hpp"

#include <algorithm>
#include <cmath>

#include "spectrasort/error.hpp"

namespace spectrasort {

std::string_view to_string(ScalerKind k) {
  switch (k) {
    case ScalerKind::Standard: return "standard";
    case ScalerKind::MinMax: return "minmax";
    case ScalerKind::MaxAbs: return "maxabs";
    case ScalerKind::Robust: return "robust";
    case ScalerKind::Normalizer: return "normalizer";
    case ScalerKind::NoScaler: return "none";
  }
  return "unknown";
}

std::optional<ScalerKind> scaler_from_string(std::string_view s) {
  for (auto k : all_scaler_kinds())
    if (to_string(k) == s) return k;
  return std::nullopt;
}

const std::vector<ScalerKind>& all_scaler_kinds() {
  static const std::vector<ScalerKind> kinds = {ScalerKind::Standard, ScalerKind::MinMax,
                                                ScalerKind::MaxAbs,   ScalerKind::Robust,
                                                ScalerKind::Normalizer, ScalerKind::NoScaler};
  return kinds;
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error(Errc::EmptyDataset, "quantile of no values");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

ScalerParams fit_scaler(ScalerKind kind, const Matrix& train) {
  if (train.rows() == 0) throw Error(Errc::EmptyDataset, "cannot fit a scaler on 0 rows");
  ScalerParams p;
  p.kind = kind;
  p.n_features = static_cast<std::size_t>(train.cols());
  const auto d = train.cols();
  const auto n = static_cast<double>(train.rows());

  switch (kind) {
    case ScalerKind::Standard: {
      p.location = train.colwise().sum().transpose() / n;
      p.spread.resize(d);
      for (Eigen::Index c = 0; c < d; ++c) {
        // A constant column has exactly zero spread; the summed mean can miss
        // the constant by an ulp and leave rounding noise as the deviation.
        if (train.col(c).minCoeff() == train.col(c).maxCoeff()) {
          p.location[c] = train(0, c);
          p.spread[c] = 0.0;
          continue;
        }
        p.spread[c] = std::sqrt((train.col(c).array() - p.location[c]).square().sum() / n);
      }
      break;
    }
    case ScalerKind::MinMax:
      p.location = train.colwise().minCoeff().transpose();
      p.spread = train.colwise().maxCoeff().transpose() - p.location;
      break;
    case ScalerKind::MaxAbs:
      p.location = Vector::Zero(d);
      p.spread = train.cwiseAbs().colwise().maxCoeff().transpose();
      break;
    case ScalerKind::Robust: {
      p.location.resize(d);
      p.spread.resize(d);
      std::vector<double> column(static_cast<std::size_t>(train.rows()));
      for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < train.rows(); ++r) column[static_cast<std::size_t>(r)] = train(r, c);
        std::sort(column.begin(), column.end());
        p.location[c] = sorted_quantile(column, 0.5);
        p.spread[c] = sorted_quantile(column, 0.75) - sorted_quantile(column, 0.25);
      }
      break;
    }
    case ScalerKind::Normalizer:
    case ScalerKind::NoScaler:
      break;
  }
  return p;
}

namespace {

void check_width(const ScalerParams& p, Eigen::Index cols) {
  if (static_cast<std::size_t>(cols) != p.n_features)
    throw Error(Errc::DimensionMismatch, "scaler fitted on " + std::to_string(p.n_features) +
                                             " features, input has " + std::to_string(cols));
}

template <typename RowExpr>
void scale_row(const ScalerParams& p, RowExpr&& row) {
  switch (p.kind) {
    case ScalerKind::NoScaler:
      return;
    case ScalerKind::Normalizer: {
      const double norm = row.norm();
      if (norm > 0.0) row /= norm;
      return;
    }
    default:
      for (Eigen::Index c = 0; c < row.size(); ++c) {
        const double s = p.spread[c];
        row[c] = s > 0.0 ? (row[c] - p.location[c]) / s : 0.0;
      }
  }
}

}  // namespace

void transform_in_place(const ScalerParams& p, Matrix& x) {
  check_width(p, x.cols());
  if (p.kind == ScalerKind::NoScaler) return;
  for (Eigen::Index r = 0; r < x.rows(); ++r) scale_row(p, x.row(r));
}

Matrix transform(const ScalerParams& p, const Matrix& x) {
  Matrix out = x;
  transform_in_place(p, out);
  return out;
}

Vector transform_row(const ScalerParams& p, const Eigen::Ref<const Vector>& x) {
  check_width(p, x.size());
  Vector out = x;
  scale_row(p, out);
  return out;
}

}  // namespace spectrasort
