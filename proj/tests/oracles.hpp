#pragma once

// Independent reference implementations used only by tests. None of these
// share code with the library paths they check.

#include "cvdp/matrix.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using cvdp::Matrix;
using cvdp::Vector;

inline std::vector<int> signs(const std::vector<double>& v, double tol = 1e-9) {
  std::vector<int> s;
  for (double x : v) s.push_back(x > tol ? 1 : (x < -tol ? -1 : 0));
  return s;
}

inline int alternations_ignoring_zeros(const std::vector<int>& s) {
  std::vector<int> nz;
  std::copy_if(s.begin(), s.end(), std::back_inserter(nz), [](int x) { return x != 0; });
  int c = 0;
  for (std::size_t i = 1; i < nz.size(); ++i) c += nz[i] != nz[i - 1];
  return c;
}

/// Maximum alternations over every +-1 assignment to the zero entries.
inline int s_plus_brute(const std::vector<int>& s) {
  std::vector<std::size_t> zeros;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == 0) zeros.push_back(i);
  int best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << zeros.size()); ++mask) {
    auto t = s;
    for (std::size_t k = 0; k < zeros.size(); ++k) t[zeros[k]] = (mask >> k) & 1 ? 1 : -1;
    best = std::max(best, alternations_ignoring_zeros(t));
  }
  return best;
}

// Index sequence i, i+1, ..., n-1, 0, ..., i (the start repeated at the end).
inline std::vector<std::size_t> wrapped(std::size_t n, std::size_t i) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k <= n; ++k) idx.push_back((i + k) % n);
  return idx;
}

inline int sc_minus_rotation(const std::vector<int>& s) {
  int best = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<int> t;
    for (auto k : wrapped(s.size(), i)) t.push_back(s[k]);
    best = std::max(best, alternations_ignoring_zeros(t));
  }
  return best;
}

/// Each original zero gets one shared replacement, so the duplicated
/// endpoint of a rotation is replaced consistently.
inline int sc_plus_rotation(const std::vector<int>& s) {
  std::vector<std::size_t> zeros;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == 0) zeros.push_back(i);
  int best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << zeros.size()); ++mask) {
    auto t = s;
    for (std::size_t k = 0; k < zeros.size(); ++k) t[zeros[k]] = (mask >> k) & 1 ? 1 : -1;
    best = std::max(best, sc_minus_rotation(t));
  }
  return best;
}

/// Cofactor expansion along the first row.
inline double det_laplace(const Matrix& a) {
  const auto n = a.rows();
  if (n == 0) return 1.0;
  if (n == 1) return a(0, 0);
  double d = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Matrix sub(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r)
      for (Eigen::Index c = 0, cc = 0; c < n; ++c)
        if (c != j) sub(r - 1, cc++) = a(r, c);
    d += (j % 2 == 0 ? 1.0 : -1.0) * a(0, j) * det_laplace(sub);
  }
  return d;
}

inline Matrix submatrix(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix s(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(rows[i], cols[j]);
  return s;
}

/// Matrix exponential from Eigen's unsupported MatrixFunctions module.
inline Matrix expm(const Matrix& a) { return a.exp(); }

/// All size-p subsets of {0..n-1} in lexicographic order, by recursion.
inline void subsets(int n, int p, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == p) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, p, i + 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> subsets(int n, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  subsets(n, p, 0, cur, out);
  return out;
}

inline Matrix compound_by_laplace(const Matrix& a, int p) {
  const auto rs = subsets(static_cast<int>(a.rows()), p);
  const auto cs = subsets(static_cast<int>(a.cols()), p);
  Matrix out(static_cast<Eigen::Index>(rs.size()), static_cast<Eigen::Index>(cs.size()));
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = 0; j < cs.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = det_laplace(submatrix(a, rs[i], cs[j]));
  return out;
}

inline Matrix random_matrix(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = g(rng);
  return a;
}

/// Random member of Q+: arbitrary diagonal, positive sub/super-diagonal,
/// nonnegative corners.
inline Matrix random_q_plus(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> pos(0.1, 1.0), diag(-2.0, 2.0), coin(0.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, i) = diag(rng);
  for (int i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = pos(rng);
    a(i + 1, i) = pos(rng);
  }
  if (n >= 3) {
    if (coin(rng) < 0.5) a(0, n - 1) = pos(rng);
    if (coin(rng) < 0.5) a(n - 1, 0) = pos(rng);
  }
  return a;
}

/// Gaussian kernel at increasing jittered nodes: strictly totally positive.
inline Matrix random_tp(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> gap(0.6, 1.4);
  std::vector<double> x(n), z(n);
  double sx = 0.0, sz = 0.0;
  for (int i = 0; i < n; ++i) {
    x[i] = sx;
    z[i] = sz;
    sx += gap(rng);
    sz += gap(rng);
  }
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = std::exp(-0.3 * (x[i] - z[j]) * (x[i] - z[j]));
  return a;
}

/// Cyclic permutation matrix sending e_i to e_{i+k}.
inline Matrix cyclic_shift(int n, int k) {
  Matrix p = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) p(((i + k) % n + n) % n, i) = 1.0;
  return p;
}

}  // namespace oracle
