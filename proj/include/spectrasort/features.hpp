#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectrasort/types.hpp"

namespace spectrasort {

enum class ScalerKind { Standard, MinMax, MaxAbs, Robust, Normalizer, NoScaler };

std::string_view to_string(ScalerKind k);
std::optional<ScalerKind> scaler_from_string(std::string_view s);
const std::vector<ScalerKind>& all_scaler_kinds();

/// Fitted per-feature statistics. Every column-wise scaler maps
/// x -> (x - location) / spread, and columns with zero spread map to 0:
///
///   Standard  location = mean,    spread = population std
///   MinMax    location = min,     spread = max - min
///   MaxAbs    location = 0,       spread = max |x|
///   Robust    location = median,  spread = q75 - q25
///
/// Normalizer and NoScaler keep both vectors empty.
struct ScalerParams {
  ScalerKind kind = ScalerKind::NoScaler;
  std::size_t n_features = 0;
  Vector location;
  Vector spread;
};

/// Statistics from the training rows only. Errors: EmptyDataset.
ScalerParams fit_scaler(ScalerKind kind, const Matrix& train);

/// Errors: DimensionMismatch.
Matrix transform(const ScalerParams& p, const Matrix& x);
void transform_in_place(const ScalerParams& p, Matrix& x);
Vector transform_row(const ScalerParams& p, const Eigen::Ref<const Vector>& x);

/// Linear-interpolation quantile of already sorted values, q in [0,1].
double sorted_quantile(const std::vector<double>& sorted, double q);

}  // namespace spectrasort
