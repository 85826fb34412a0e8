#pragma once

// Static matrix classification: sign regularity of each order, Metzler and
// irreducibility tests, the banded classes M, M+, Q, Q+, and the decision
// chain that labels a constant generator as CVDS and/or TPDS.

#include "cvdp/compound.hpp"
#include "cvdp/error.hpp"
#include "cvdp/matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cvdp {

enum class SsrStatus { strictly_signed, weakly_signed, mixed };

inline std::string to_string(SsrStatus s) {
  switch (s) {
    case SsrStatus::strictly_signed: return "strictly_signed";
    case SsrStatus::weakly_signed: return "weakly_signed";
    case SsrStatus::mixed: return "mixed";
  }
  return "mixed";
}

struct MinorWitness {
  IndexSet rows;
  IndexSet cols;
  double value = 0.0;

  bool operator==(const MinorWitness&) const = default;
};

struct SsrVerdict {
  int order = 0;
  SsrStatus status = SsrStatus::mixed;
  int sign = 0;  // common sign for strictly/weakly signed, 0 for mixed or all-zero
  std::vector<MinorWitness> witness;

  bool strict() const { return status == SsrStatus::strictly_signed; }
  bool weak_or_strict() const { return status != SsrStatus::mixed; }
  bool operator==(const SsrVerdict&) const = default;
};

/// Classifies all order-k minors. A minor counts as zero when
/// |minor| <= tol * (max |entry| of the submatrix)^k.
///   strictly_signed  every minor nonzero, common sign; witness = first minor
///   weakly_signed    no two minors of opposite strict sign; witness = first
///                    zero minor and, if any, first nonzero minor
///   mixed            witness = first positive and first negative minor
inline SsrVerdict ssr_verdict(const Matrix& a, int k, double tol = kDefaultTol) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  if (k < 1 || k > std::min(n, m))
    throw Error(ErrorCode::order_out_of_range, "sign-regularity order " + std::to_string(k) + " out of range");
  std::optional<MinorWitness> first_pos, first_neg, first_zero;
  for_each_index_set(n, k, [&](const std::vector<int>& rows, std::size_t) {
    for_each_index_set(m, k, [&](const std::vector<int>& cols, std::size_t) {
      const double v = minor(a, rows, cols);
      const double thr = tol * minor_scale(a, rows, cols);
      auto& slot = std::abs(v) <= thr ? first_zero : (v > 0 ? first_pos : first_neg);
      if (!slot) slot = MinorWitness{IndexSet(rows, n), IndexSet(cols, m), v};
    });
  });
  SsrVerdict out;
  out.order = k;
  if (first_pos && first_neg) {
    out.status = SsrStatus::mixed;
    out.witness = {*first_pos, *first_neg};
    return out;
  }
  const auto& nonzero = first_pos ? first_pos : first_neg;
  out.sign = first_pos ? 1 : (first_neg ? -1 : 0);
  if (!first_zero) {
    out.status = SsrStatus::strictly_signed;
    out.witness = {*nonzero};
    return out;
  }
  out.status = SsrStatus::weakly_signed;
  out.witness = {*first_zero};
  if (nonzero) out.witness.push_back(*nonzero);
  return out;
}

inline bool is_metzler(const Matrix& a, double tol = kDefaultTol) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::dimension_mismatch, "Metzler test needs a square matrix");
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j && a(i, j) < -tol) return false;
  return true;
}

namespace detail {

inline std::vector<char> reachable(const Matrix& a, double tol, bool transposed) {
  const auto n = a.rows();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (Eigen::Index v = 0; v < n; ++v) {
      const double w = transposed ? a(v, u) : a(u, v);
      if (v == u || seen[static_cast<std::size_t>(v)] || std::abs(w) <= tol) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      stack.push_back(v);
    }
  }
  return seen;
}

}  // namespace detail

/// Strong connectivity of the digraph with an edge i -> j whenever i != j and
/// |a_ij| > tol: forward and backward reachability from the first node.
inline bool is_irreducible(const Matrix& a, double tol = kDefaultTol) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::dimension_mismatch, "irreducibility test needs a square matrix");
  if (a.rows() <= 1) return true;
  for (bool transposed : {false, true}) {
    const auto seen = detail::reachable(a, tol, transposed);
    for (char s : seen)
      if (!s) return false;
  }
  return true;
}

/// Main, super- and sub-diagonal plus the corners (1,n) and (n,1).
inline bool in_cyclic_band(Eigen::Index i, Eigen::Index j, Eigen::Index n) {
  const auto d = i > j ? i - j : j - i;
  return d <= 1 || d == n - 1;
}

inline bool in_Q(const Matrix& a, double tol = kDefaultTol) {
  if (!is_metzler(a, tol)) return false;
  const auto n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (!in_cyclic_band(i, j, n) && std::abs(a(i, j)) > tol) return false;
  return true;
}

inline bool in_Q_plus(const Matrix& a, double tol = kDefaultTol) { return in_Q(a, tol) && is_irreducible(a, tol); }

/// Tridiagonal with nonnegative sub- and super-diagonal.
inline bool in_M(const Matrix& a, double tol = kDefaultTol) {
  if (!is_metzler(a, tol)) return false;
  const auto n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(i - j) > 1 && std::abs(a(i, j)) > tol) return false;
  return true;
}

/// Tridiagonal with strictly positive sub- and super-diagonal.
inline bool in_M_plus(const Matrix& a, double tol = kDefaultTol) {
  if (!in_M(a, tol)) return false;
  for (Eigen::Index i = 0; i + 1 < a.rows(); ++i)
    if (a(i, i + 1) <= tol || a(i + 1, i) <= tol) return false;
  return true;
}

enum class FlowchartCheck { none, a_metzler, a_irreducible, a3_metzler, a3_irreducible, structure };

inline std::string to_string(FlowchartCheck c) {
  switch (c) {
    case FlowchartCheck::none: return "none";
    case FlowchartCheck::a_metzler: return "A Metzler";
    case FlowchartCheck::a_irreducible: return "A irreducible";
    case FlowchartCheck::a3_metzler: return "A^[3] Metzler";
    case FlowchartCheck::a3_irreducible: return "A^[3] irreducible";
    case FlowchartCheck::structure: return "structure";
  }
  return "none";
}

struct FlowchartResult {
  bool cvds = false;
  bool tpds = false;
  FlowchartCheck failed = FlowchartCheck::none;
  std::string reason;
};

/// CVDS iff A and A^[3] are Metzler and irreducible (for n >= 3; A alone for
/// smaller n); TPDS additionally needs the tridiagonal structure.
inline FlowchartResult cvds_tpds_flowchart(const Matrix& a, double tol = kDefaultTol) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::dimension_mismatch, "flowchart needs a square matrix");
  FlowchartResult r;
  auto fail = [&](FlowchartCheck c, std::string why) {
    r.failed = c;
    r.reason = std::move(why);
    return r;
  };
  if (!is_metzler(a, tol)) return fail(FlowchartCheck::a_metzler, "A is not Metzler: not CVDS, not TPDS");
  if (!is_irreducible(a, tol)) return fail(FlowchartCheck::a_irreducible, "A is reducible: not CVDS, not TPDS");
  if (a.rows() >= 3) {
    const Matrix a3 = add_compound(a, 3).entries;
    if (!is_metzler(a3, tol)) return fail(FlowchartCheck::a3_metzler, "A^[3] is not Metzler: not CVDS, not TPDS");
    if (!is_irreducible(a3, tol))
      return fail(FlowchartCheck::a3_irreducible, "A^[3] is reducible: not CVDS, not TPDS");
  }
  r.cvds = true;
  if (!in_M_plus(a, tol)) {
    r.failed = FlowchartCheck::structure;
    r.reason = "A is in Q+ but not tridiagonal with positive off-diagonals: CVDS, not TPDS";
    return r;
  }
  r.tpds = true;
  r.reason = "A is in M+: TPDS and CVDS";
  return r;
}

struct ClassificationReport {
  int rows = 0;
  int cols = 0;
  std::vector<SsrVerdict> ssr;
  bool metzler = false;
  bool irreducible = false;
  bool in_M = false;
  bool in_M_plus = false;
  bool in_Q = false;
  bool in_Q_plus = false;
  bool cvds = false;
  bool tpds = false;
  std::string reason;

  bool operator==(const ClassificationReport&) const = default;
};

/// Structural fields stay false for rectangular input; ssr is always filled.
inline ClassificationReport classify(const Matrix& a, double tol = kDefaultTol) {
  ClassificationReport r;
  r.rows = static_cast<int>(a.rows());
  r.cols = static_cast<int>(a.cols());
  const int kmax = std::min(r.rows, r.cols);
  const bool capped = std::max(r.rows, r.cols) <= kMaxCompoundDim;
  for (int k = 1; k <= kmax && capped; ++k) r.ssr.push_back(ssr_verdict(a, k, tol));
  if (r.rows != r.cols || r.rows == 0) {
    r.reason = "rectangular matrix: structural classes apply to square matrices only";
    return r;
  }
  r.metzler = is_metzler(a, tol);
  r.irreducible = is_irreducible(a, tol);
  r.in_M = in_M(a, tol);
  r.in_M_plus = in_M_plus(a, tol);
  r.in_Q = in_Q(a, tol);
  r.in_Q_plus = r.in_Q && r.irreducible;
  const auto fc = cvds_tpds_flowchart(a, tol);
  r.cvds = fc.cvds;
  r.tpds = fc.tpds;
  r.reason = fc.reason;
  return r;
}

/// D A D^-1 for D = diag(d), all d_i > 0.
inline Matrix diag_scale(const Matrix& a, const Vector& d) {
  if (a.rows() != a.cols() || d.size() != a.rows())
    throw Error(ErrorCode::dimension_mismatch, "diagonal scaling needs a square matrix and a matching vector");
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (!(d[i] > 0.0)) throw Error(ErrorCode::nonpositive_scale, "diagonal scaling entries must be positive");
  Matrix out = a;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = d[i] * a(i, j) / d[j];
  return out;
}

}  // namespace cvdp
