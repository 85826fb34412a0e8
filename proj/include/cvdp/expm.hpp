#pragma once

// Matrix exponential by shifted scaling and squaring.
//
// A is shifted by c*I so the diagonal is nonnegative; for a Metzler matrix
// every term of the series and every squaring then stays entrywise
// nonnegative, so zero patterns are exact and tiny positive entries keep
// full relative accuracy. The e^{-c} factor is folded in before squaring.

#include "cvdp/error.hpp"
#include "cvdp/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace cvdp {

inline Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::dimension_mismatch, "matrix exponential needs a square matrix");
  const auto n = a.rows();
  if (n == 0) return a;
  double c = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) c = std::max(c, -a(i, i));
  Matrix b = a + c * Matrix::Identity(n, n);
  if (!b.allFinite()) throw Error(ErrorCode::numerical_abort, "matrix exponential of a non-finite matrix");

  const double norm = b.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  b = std::ldexp(1.0, -s) * b;

  // Enough terms that entries reached only through long paths in the
  // digraph of A still appear in the truncated series.
  const int terms = std::clamp(static_cast<int>(n) + 1, 24, 200);
  Matrix term = Matrix::Identity(n, n);
  Matrix sum = term;
  for (int k = 1; k <= terms; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
  }
  sum *= std::exp(-std::ldexp(c, -s));
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

/// exp(t A).
inline Matrix expm(const Matrix& a, double t) { return expm(t * a); }

}  // namespace cvdp
