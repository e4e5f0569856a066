#pragma once

// Independent reference implementations shared by the unit tests and the
// acceptance binary. None of this calls into the library's metric or scaler
// code; it recomputes everything from the definitions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "spectrasort/eval.hpp"
#include "spectrasort/features.hpp"
#include "spectrasort/learn.hpp"

namespace oracle {

using spectrasort::Matrix;
using spectrasort::Vector;

// ---------------------------------------------------------------------------
// Metrics by brute force: count each cell by scanning all pairs.
// ---------------------------------------------------------------------------

inline std::vector<std::vector<long>> confusion(const std::vector<int>& t, const std::vector<int>& p, int n) {
  std::vector<std::vector<long>> m(n, std::vector<long>(n, 0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] == a && p[i] == b) ++m[a][b];
  return m;
}

inline double macro_f1(const std::vector<int>& t, const std::vector<int>& p, int n) {
  double sum = 0;
  for (int c = 0; c < n; ++c) {
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      tp += t[i] == c && p[i] == c;
      fp += t[i] != c && p[i] == c;
      fn += t[i] == c && p[i] != c;
    }
    const double prec = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    const double rec = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    sum += prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
  }
  return sum / n;
}

inline double macro_f1_from_counts(const std::vector<std::vector<long>>& m) {
  const int n = static_cast<int>(m.size());
  double sum = 0;
  for (int c = 0; c < n; ++c) {
    long tp = m[c][c], fp = 0, fn = 0;
    for (int k = 0; k < n; ++k)
      if (k != c) {
        fp += m[k][c];
        fn += m[c][k];
      }
    const double prec = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    const double rec = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    sum += prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
  }
  return sum / n;
}

// ---------------------------------------------------------------------------
// Scaler post-conditions. Returns an empty string on success, otherwise a
// description of the first violation.
// ---------------------------------------------------------------------------

inline double quantile_sorted(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (v[hi] - v[lo]) * (pos - double(lo));
}

inline std::string check_scaler(spectrasort::ScalerKind kind, const Matrix& x, double tol = 1e-9) {
  using spectrasort::ScalerKind;
  const auto p = spectrasort::fit_scaler(kind, x);
  const Matrix y = spectrasort::transform(p, x);
  const auto n = x.rows();
  const auto fail = [](const std::string& what, long r, long c) {
    return what + " at (" + std::to_string(r) + "," + std::to_string(c) + ")";
  };
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    std::vector<double> col;
    for (Eigen::Index r = 0; r < n; ++r) col.push_back(x(r, c));
    const double mn = *std::min_element(col.begin(), col.end());
    const double mx = *std::max_element(col.begin(), col.end());
    double mean = 0, maxabs = 0;
    for (double v : col) {
      mean += v;
      maxabs = std::max(maxabs, std::abs(v));
    }
    mean /= double(n);
    double var = 0;
    for (double v : col) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / double(n));
    const double med = quantile_sorted(col, 0.5);
    const double iqr = quantile_sorted(col, 0.75) - quantile_sorted(col, 0.25);

    for (Eigen::Index r = 0; r < n; ++r) {
      const double v = x(r, c), out = y(r, c);
      double expect = v;
      switch (kind) {
        case ScalerKind::Standard: expect = mx > mn ? (v - mean) / sd : 0.0; break;
        case ScalerKind::MinMax: expect = mx > mn ? (v - mn) / (mx - mn) : 0.0; break;
        case ScalerKind::MaxAbs: expect = maxabs > 0 ? v / maxabs : 0.0; break;
        case ScalerKind::Robust: expect = iqr > 0 ? (v - med) / iqr : 0.0; break;
        default: break;
      }
      if (kind != ScalerKind::Normalizer && std::abs(out - expect) > tol * std::max(1.0, std::abs(expect)))
        return fail(std::string(to_string(kind)) + " value mismatch", r, c);
      if (kind == ScalerKind::MinMax && (out < -tol || out > 1 + tol)) return fail("minmax outside [0,1]", r, c);
      if (kind == ScalerKind::MaxAbs && std::abs(out) > 1 + tol) return fail("maxabs outside [-1,1]", r, c);
    }
    if (kind == ScalerKind::Standard && mx > mn) {
      double m2 = 0, v2 = 0;
      for (Eigen::Index r = 0; r < n; ++r) m2 += y(r, c);
      m2 /= double(n);
      for (Eigen::Index r = 0; r < n; ++r) v2 += (y(r, c) - m2) * (y(r, c) - m2);
      if (std::abs(m2) > tol) return fail("standard mean not 0", 0, c);
      if (std::abs(std::sqrt(v2 / double(n)) - 1.0) > tol) return fail("standard std not 1", 0, c);
    }
  }
  if (kind == ScalerKind::Normalizer) {
    for (Eigen::Index r = 0; r < n; ++r) {
      double norm_in = 0, norm_out = 0;
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        norm_in += x(r, c) * x(r, c);
        norm_out += y(r, c) * y(r, c);
      }
      if (norm_in == 0) {
        if (norm_out != 0) return fail("zero row changed", r, 0);
      } else {
        if (std::abs(std::sqrt(norm_out) - 1.0) > tol) return fail("row norm not 1", r, 0);
        for (Eigen::Index c = 0; c < x.cols(); ++c)
          if (std::abs(y(r, c) - x(r, c) / std::sqrt(norm_in)) > tol) return fail("normalizer value", r, c);
      }
    }
  }
  // Transform of the fitting data row by row agrees with the batch form.
  for (Eigen::Index r = 0; r < std::min<Eigen::Index>(n, 3); ++r) {
    const Vector row = x.row(r).transpose();
    const Vector t = spectrasort::transform_row(p, row);
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      if (t[c] != y(r, c)) return fail("transform_row differs from transform", r, c);
  }
  return {};
}

// Random matrix with a constant column, an all-zero column and, optionally,
// an all-zero row, for the zero-spread guards.
inline Matrix awkward_matrix(std::mt19937_64& g, int rows, int cols, bool zero_row) {
  std::uniform_real_distribution<double> u(-3.0, 5.0);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = u(g);
  m.col(0).setConstant(0.7);
  m.col(cols - 1).setZero();
  if (zero_row) m.row(rows / 2).setZero();
  return m;
}

// ---------------------------------------------------------------------------
// Central finite differences.
// ---------------------------------------------------------------------------

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)});
}

// Smallest |pre-activation| of the hidden layer. Central differences are
// only meaningful when it exceeds the step, away from the ReLU kink.
inline double min_abs_preactivation(const spectrasort::MlpModel& net, const Matrix& x) {
  Matrix pre = x * net.w1.transpose();
  pre.rowwise() += net.b1.transpose();
  return pre.cwiseAbs().minCoeff();
}

// Largest relative error between an analytic gradient and central
// differences of f over every coordinate of `param`.
inline double max_fd_error(const std::function<double()>& f, double* param, std::size_t size,
                           const double* analytic, double h = 1e-5) {
  double worst = 0;
  for (std::size_t i = 0; i < size; ++i) {
    const double keep = param[i];
    param[i] = keep + h;
    const double up = f();
    param[i] = keep - h;
    const double down = f();
    param[i] = keep;
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, relative_error(fd, analytic[i]));
  }
  return worst;
}

}  // namespace oracle
