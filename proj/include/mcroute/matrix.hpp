#ifndef MCROUTE_MATRIX_HPP
#define MCROUTE_MATRIX_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace mcroute {

// Dense row-major matrix of doubles. Small dimensions, value semantics.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int i, int j) {
    assert(i >= 0 && i < rows && j >= 0 && j < cols);
    return data[static_cast<size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    assert(i >= 0 && i < rows && j >= 0 && j < cols);
    return data[static_cast<size_t>(i) * cols + j];
  }

  std::span<double> row(int i) {
    return {data.data() + static_cast<size_t>(i) * cols,
            static_cast<size_t>(cols)};
  }
  std::span<const double> row(int i) const {
    return {data.data() + static_cast<size_t>(i) * cols,
            static_cast<size_t>(cols)};
  }

  bool same_shape(const Matrix& o) const {
    return rows == o.rows && cols == o.cols;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
  }
};

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double x : a.data) s += x * x;
  return std::sqrt(s);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  assert(a.same_shape(b));
  double d = 0.0;
  for (size_t k = 0; k < a.data.size(); ++k)
    d = std::max(d, std::abs(a.data[k] - b.data[k]));
  return d;
}

// Routing decision variables: entry (i, j) is the rate source i sends to
// node j. Row sums are the per-source offered rates.
using RoutingMatrix = Matrix;

// Adds the tiny residual left by a bisection to one coordinate so the vector
// sums to `total` exactly, staying within [0, upper]. Picks the coordinate
// with the most headroom in the needed direction; no-op if none can absorb
// the residual.
inline void fix_row_sum(std::vector<double>& x, double total,
                        const std::vector<double>& upper) {
  double sum = 0.0;
  for (double v : x) sum += v;
  const double residual = total - sum;
  if (residual == 0.0) return;
  int pick = -1;
  double best_headroom = 0.0;
  for (size_t j = 0; j < x.size(); ++j) {
    const double headroom = residual > 0.0 ? upper[j] - x[j] : x[j];
    if (headroom > best_headroom) {
      best_headroom = headroom;
      pick = static_cast<int>(j);
    }
  }
  if (pick >= 0 && best_headroom >= std::abs(residual)) x[pick] += residual;
}

}  // namespace mcroute

#endif  // MCROUTE_MATRIX_HPP
