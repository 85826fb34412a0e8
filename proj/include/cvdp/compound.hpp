#pragma once

// Minors, lexicographic index-set combinatorics, and multiplicative /
// additive compound matrices.
//
// Index sets are stored 0-based; reports print them 1-based. Row and column
// labels of every compound follow the lexicographic order of index sets.

#include "cvdp/error.hpp"
#include "cvdp/matrix.hpp"

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cvdp {

/// Largest ambient dimension a compound is built for unless overridden.
/// C(14,7)^2 is about 1.2e7 entries.
inline constexpr int kMaxCompoundDim = 14;

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

class IndexSet {
 public:
  IndexSet() = default;

  /// indices: strictly increasing, 0-based, each in [0, n).
  IndexSet(std::vector<int> indices, int n) : idx_(std::move(indices)), n_(n) {
    for (std::size_t k = 0; k < idx_.size(); ++k) {
      const bool in_range = idx_[k] >= 0 && idx_[k] < n_;
      const bool increasing = k == 0 || idx_[k - 1] < idx_[k];
      if (!in_range || !increasing)
        throw Error(ErrorCode::invalid_argument, "index set must be strictly increasing within [1, n]");
    }
  }

  static IndexSet one_based(std::initializer_list<int> indices, int n) {
    std::vector<int> v;
    for (int i : indices) v.push_back(i - 1);
    return IndexSet(std::move(v), n);
  }

  static IndexSet one_based(const std::vector<int>& indices, int n) {
    std::vector<int> v;
    for (int i : indices) v.push_back(i - 1);
    return IndexSet(std::move(v), n);
  }

  std::span<const int> indices() const { return idx_; }
  std::vector<int> one_based() const {
    std::vector<int> v(idx_);
    for (int& i : v) ++i;
    return v;
  }
  int size() const { return static_cast<int>(idx_.size()); }
  int ambient() const { return n_; }
  int operator[](int k) const { return idx_[static_cast<std::size_t>(k)]; }
  bool contains(int i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }
  std::size_t rank() const;

  bool operator==(const IndexSet&) const = default;

 private:
  std::vector<int> idx_;
  int n_ = 0;
};

/// Rank of a sorted 0-based combination among all C(n, p) in lexicographic order.
inline std::size_t lex_rank(std::span<const int> s, int n) {
  const int p = static_cast<int>(s.size());
  std::size_t r = 0;
  int next = 0;
  for (int k = 0; k < p; ++k) {
    for (int v = next; v < s[static_cast<std::size_t>(k)]; ++v) r += binomial(n - 1 - v, p - 1 - k);
    next = s[static_cast<std::size_t>(k)] + 1;
  }
  return r;
}

inline std::size_t lex_rank(const IndexSet& s) { return lex_rank(s.indices(), s.ambient()); }

inline std::size_t IndexSet::rank() const { return lex_rank(*this); }

inline IndexSet lex_unrank(std::size_t r, int n, int p) {
  if (p < 0 || p > n) throw Error(ErrorCode::order_out_of_range, "index-set size out of range");
  if (r >= binomial(n, p)) throw Error(ErrorCode::rank_out_of_range, "rank exceeds C(n, p) - 1");
  std::vector<int> out;
  int v = 0;
  for (int k = 0; k < p; ++k) {
    for (;; ++v) {
      const std::size_t block = binomial(n - 1 - v, p - 1 - k);
      if (r < block) break;
      r -= block;
    }
    out.push_back(v++);
  }
  return IndexSet(std::move(out), n);
}

/// Advances c to its lexicographic successor among p-subsets of [0, n).
inline bool next_combination(std::vector<int>& c, int n) {
  const int p = static_cast<int>(c.size());
  int k = p - 1;
  while (k >= 0 && c[static_cast<std::size_t>(k)] == n - p + k) --k;
  if (k < 0) return false;
  ++c[static_cast<std::size_t>(k)];
  for (int j = k + 1; j < p; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

/// Calls f(combination, rank) for every p-subset of [0, n) in lexicographic order.
template <class F>
void for_each_index_set(int n, int p, F&& f) {
  if (p < 0 || p > n) return;
  std::vector<int> c(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) c[static_cast<std::size_t>(k)] = k;
  std::size_t rank = 0;
  do {
    f(std::as_const(c), rank++);
  } while (next_combination(c, n));
}

inline std::vector<IndexSet> all_index_sets(int n, int p) {
  std::vector<IndexSet> out;
  out.reserve(binomial(n, p));
  for_each_index_set(n, p, [&](const std::vector<int>& c, std::size_t) { out.emplace_back(c, n); });
  return out;
}

namespace detail {

// Determinant of a k x k row-major buffer; closed forms up to k = 3, LU with
// partial pivoting beyond. Accumulates in long double.
inline double small_det(std::vector<long double>& a, int k) {
  auto at = [&](int i, int j) -> long double& { return a[static_cast<std::size_t>(i * k + j)]; };
  switch (k) {
    case 0: return 1.0;
    case 1: return static_cast<double>(at(0, 0));
    case 2: return static_cast<double>(at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0));
    case 3:
      return static_cast<double>(at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
                                 at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
                                 at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0)));
    default: break;
  }
  long double det = 1.0L;
  for (int c = 0; c < k; ++c) {
    int piv = c;
    for (int r = c + 1; r < k; ++r)
      if (std::abs(at(r, c)) > std::abs(at(piv, c))) piv = r;
    if (at(piv, c) == 0.0L) return 0.0;
    if (piv != c) {
      for (int j = 0; j < k; ++j) std::swap(at(c, j), at(piv, j));
      det = -det;
    }
    det *= at(c, c);
    for (int r = c + 1; r < k; ++r) {
      const long double f = at(r, c) / at(c, c);
      if (f == 0.0L) continue;
      for (int j = c + 1; j < k; ++j) at(r, j) -= f * at(c, j);
    }
  }
  return static_cast<double>(det);
}

}  // namespace detail

/// Minor A(rows | cols) for 0-based sorted index lists of equal length.
inline double minor(const Matrix& a, std::span<const int> rows, std::span<const int> cols) {
  if (rows.size() != cols.size())
    throw Error(ErrorCode::dimension_mismatch, "row and column index sets differ in cardinality");
  const int k = static_cast<int>(rows.size());
  std::vector<long double> buf(static_cast<std::size_t>(k * k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      buf[static_cast<std::size_t>(i * k + j)] = a(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
  return detail::small_det(buf, k);
}

inline double minor(const Matrix& a, const IndexSet& rows, const IndexSet& cols) {
  if (rows.size() != cols.size())
    throw Error(ErrorCode::dimension_mismatch, "row and column index sets differ in cardinality");
  if (rows.ambient() != a.rows() || cols.ambient() != a.cols())
    throw Error(ErrorCode::dimension_mismatch, "index-set ambient dimension does not match the matrix");
  return minor(a, rows.indices(), cols.indices());
}

inline double determinant(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::dimension_mismatch, "determinant of a non-square matrix");
  std::vector<int> all(static_cast<std::size_t>(a.rows()));
  for (int i = 0; i < static_cast<int>(a.rows()); ++i) all[static_cast<std::size_t>(i)] = i;
  return minor(a, all, all);
}

/// Product over the selected rows of max |a_ij| on the selected columns.
/// Bounds |minor| up to k! and is invariant under row scaling.
inline double minor_scale(const Matrix& a, std::span<const int> rows, std::span<const int> cols) {
  double s = 1.0;
  for (int i : rows) {
    double m = 0.0;
    for (int j : cols) m = std::max(m, std::abs(a(i, j)));
    s *= m;
  }
  return s;
}

enum class CompoundKind { multiplicative, additive };

inline std::string to_string(CompoundKind k) {
  return k == CompoundKind::multiplicative ? "multiplicative" : "additive";
}

struct CompoundMatrix {
  int order = 0;
  int ambient_dim = 0;   // rows of the source matrix
  int ambient_cols = 0;  // columns of the source matrix
  CompoundKind kind = CompoundKind::multiplicative;
  Matrix entries;

  std::vector<IndexSet> row_labels() const { return all_index_sets(ambient_dim, order); }
  std::vector<IndexSet> col_labels() const { return all_index_sets(ambient_cols, order); }

  bool operator==(const CompoundMatrix& o) const {
    return order == o.order && ambient_dim == o.ambient_dim && ambient_cols == o.ambient_cols && kind == o.kind &&
           entries.rows() == o.entries.rows() && entries.cols() == o.entries.cols() && entries == o.entries;
  }
};

namespace detail {

inline void check_compound_order(int p, int n, int m, int max_dim) {
  if (p < 1 || p > std::min(n, m))
    throw Error(ErrorCode::order_out_of_range,
                "compound order " + std::to_string(p) + " outside [1, " + std::to_string(std::min(n, m)) + "]");
  if (std::max(n, m) > max_dim)
    throw Error(ErrorCode::order_out_of_range,
                "ambient dimension " + std::to_string(std::max(n, m)) + " exceeds the compound cap " +
                    std::to_string(max_dim));
}

}  // namespace detail

/// p-th multiplicative compound: all p x p minors in lexicographic order.
inline CompoundMatrix mult_compound(const Matrix& a, int p, int max_dim = kMaxCompoundDim) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  detail::check_compound_order(p, n, m, max_dim);
  CompoundMatrix out{p, n, m, CompoundKind::multiplicative,
                     Matrix(static_cast<Eigen::Index>(binomial(n, p)), static_cast<Eigen::Index>(binomial(m, p)))};
  for_each_index_set(n, p, [&](const std::vector<int>& rows, std::size_t ra) {
    for_each_index_set(m, p, [&](const std::vector<int>& cols, std::size_t rb) {
      out.entries(static_cast<Eigen::Index>(ra), static_cast<Eigen::Index>(rb)) = minor(a, rows, cols);
    });
  });
  return out;
}

/// p-th additive compound, assembled entrywise:
///   diagonal            sum_k a(i_k, i_k)
///   |alpha ^ beta|=p-1  (-1)^(l+m) a(i_l, j_m), i_l the row index not in beta,
///                       j_m the column index not in alpha
///   otherwise           0
inline CompoundMatrix add_compound(const Matrix& a, int p, int max_dim = kMaxCompoundDim) {
  const int n = static_cast<int>(a.rows());
  if (a.rows() != a.cols()) throw Error(ErrorCode::dimension_mismatch, "additive compound needs a square matrix");
  detail::check_compound_order(p, n, n, max_dim);
  const auto dim = static_cast<Eigen::Index>(binomial(n, p));
  CompoundMatrix out{p, n, n, CompoundKind::additive, Matrix::Zero(dim, dim)};
  std::vector<int> beta(static_cast<std::size_t>(p));
  for_each_index_set(n, p, [&](const std::vector<int>& alpha, std::size_t ra) {
    const auto row = static_cast<Eigen::Index>(ra);
    double diag = 0.0;
    for (int i : alpha) diag += a(i, i);
    out.entries(row, row) = diag;
    for (int l = 0; l < p; ++l) {
      const int i = alpha[static_cast<std::size_t>(l)];
      for (int j = 0; j < n; ++j) {
        if (std::binary_search(alpha.begin(), alpha.end(), j)) continue;
        beta = alpha;
        beta[static_cast<std::size_t>(l)] = j;
        std::sort(beta.begin(), beta.end());
        const int m = static_cast<int>(std::lower_bound(beta.begin(), beta.end(), j) - beta.begin());
        const double sign = ((l + m) % 2 == 0) ? 1.0 : -1.0;
        out.entries(row, static_cast<Eigen::Index>(lex_rank(beta, n))) = sign * a(i, j);
      }
    }
  });
  return out;
}

/// ((I + hA)^(p) - I) / h, the forward-difference definition of A^[p].
inline CompoundMatrix add_compound_fd(const Matrix& a, int p, double h, int max_dim = kMaxCompoundDim) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::dimension_mismatch, "additive compound needs a square matrix");
  if (!(h > 0.0)) throw Error(ErrorCode::nonpositive_parameter, "finite-difference step must be positive");
  const Matrix shifted = Matrix::Identity(a.rows(), a.cols()) + h * a;
  CompoundMatrix out = mult_compound(shifted, p, max_dim);
  out.kind = CompoundKind::additive;
  out.entries -= Matrix::Identity(out.entries.rows(), out.entries.cols());
  out.entries /= h;
  return out;
}

/// Richardson extrapolation 2 D(h/2) - D(h) of the forward difference; O(h^2).
inline CompoundMatrix add_compound_richardson(const Matrix& a, int p, double h, int max_dim = kMaxCompoundDim) {
  CompoundMatrix coarse = add_compound_fd(a, p, h, max_dim);
  const CompoundMatrix fine = add_compound_fd(a, p, h / 2.0, max_dim);
  coarse.entries = 2.0 * fine.entries - coarse.entries;
  return coarse;
}

}  // namespace cvdp
