#pragma once

// Variation-diminishing-property checkers.
//
// Every verdict is decided structurally from sign regularity of minors:
//   nonstandard(p)  SSR_{p+1}
//   scvdp           SSR_r for all odd r
//   weak_cvdp       SR_r for all odd r
//   svdp            SSR_k for all k
//   prop_sv1        SSR_m for an n x m matrix, m < n
// Sampling and witness construction only produce counterexample vectors.

#include "cvdp/classify.hpp"
#include "cvdp/compound.hpp"
#include "cvdp/error.hpp"
#include "cvdp/matrix.hpp"
#include "cvdp/signvar.hpp"

#include <Eigen/SVD>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cvdp {

enum class Relation {
  cyclic_strong,  // s_c+(Ax) <= s_c-(x)
  cyclic_weak,    // s_c-(Ax) <= s_c-(x)
  strong,         // s+(Ax) <= s-(x)
  nonstandard,    // s-(x) <= p  implies  s+(Ax) <= p
};

enum class Property { nonstandard, scvdp, weak_cvdp, svdp, prop_sv1 };

inline std::string to_string(Property p) {
  switch (p) {
    case Property::nonstandard: return "nonstandard";
    case Property::scvdp: return "scvdp";
    case Property::weak_cvdp: return "weak_cvdp";
    case Property::svdp: return "svdp";
    case Property::prop_sv1: return "prop_sv1";
  }
  return "scvdp";
}

struct Counterexample {
  Vector x;
  Vector ax;
  SignCountReport before;  // counters of x
  SignCountReport after;   // counters of Ax
  std::string source;      // "sampled" or "constructed"
  std::optional<std::size_t> sample_index;

  bool operator==(const Counterexample& o) const {
    return x.size() == o.x.size() && ax.size() == o.ax.size() && x == o.x && ax == o.ax && before == o.before &&
           after == o.after && source == o.source && sample_index == o.sample_index;
  }
};

enum class Method { structural, sampled };

struct VdpVerdict {
  Property property = Property::scvdp;
  int p = 0;  // only meaningful for nonstandard
  bool holds = false;
  std::optional<Counterexample> counterexample;
  Method method = Method::structural;
  std::size_t num_samples = 0;
  std::uint64_t seed = 0;
  std::optional<bool> sampling_agrees;  // structural verdict vs. sampled search

  bool operator==(const VdpVerdict&) const = default;
};

struct VdpOptions {
  double tol = kDefaultTol;
  std::size_t num_samples = 10000;
  std::uint64_t seed = 1;
};

inline constexpr double kSampleZeroProbability = 0.2;

/// Ax with entries snapped to exact zero when they cancel to within
/// tol * sum_j |a_ij x_j|.
inline Vector apply_snapped(const Matrix& a, const Vector& x, double tol = kDefaultTol) {
  Vector out = a * x;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    double mag = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) mag += std::abs(a(i, j) * x[j]);
    if (std::abs(out[i]) <= tol * mag) out[i] = 0.0;
  }
  return out;
}

inline bool violates(Relation rel, const SignCountReport& before, const SignCountReport& after, int p = 0) {
  switch (rel) {
    case Relation::cyclic_strong: return after.sc_plus > before.sc_minus;
    case Relation::cyclic_weak: return after.sc_minus > before.sc_minus;
    case Relation::strong: return after.s_plus > before.s_minus;
    case Relation::nonstandard: return before.s_minus <= p && after.s_plus > p;
  }
  return false;
}

/// Draws i.i.d. standard normal entries, each replaced by an exact zero with
/// probability 0.2. The stream is fully determined by the seed.
class ZeroInflatedNormal {
 public:
  explicit ZeroInflatedNormal(std::uint64_t seed) : rng_(seed) {}

  Vector draw(Eigen::Index n) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = normal_(rng_);
      const double u = uniform_(rng_);
      x[i] = u < kSampleZeroProbability ? 0.0 : z;
    }
    return x;
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

using ViolationTest = std::function<bool(const SignCountReport& before, const SignCountReport& after)>;

/// Draws are rescaled to max-abs 1 before sign counting.
inline std::optional<Counterexample> sample_counterexample(const Matrix& a, const ViolationTest& test,
                                                           std::size_t num_samples, std::uint64_t seed,
                                                           double zero_tol = kDefaultTol) {
  if (num_samples < 1) throw Error(ErrorCode::invalid_argument, "sample budget must be at least 1");
  ZeroInflatedNormal dist(seed);
  for (std::size_t s = 0; s < num_samples; ++s) {
    Vector x = dist.draw(a.cols());
    const double scale = x.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) continue;
    x /= scale;
    const Vector ax = apply_snapped(a, x, zero_tol);
    const auto before = sign_report(x, zero_tol);
    const auto after = sign_report(ax, zero_tol);
    if (test(before, after)) return Counterexample{x, ax, before, after, "sampled", s};
  }
  return std::nullopt;
}

/// First sampled x (smallest sample index) violating the relation, if any.
inline std::optional<Counterexample> sample_vdp_counterexample(const Matrix& a, Relation rel,
                                                               std::size_t num_samples, std::uint64_t seed,
                                                               int p = 0, double zero_tol = kDefaultTol) {
  return sample_counterexample(
      a, [&](const SignCountReport& b, const SignCountReport& f) { return violates(rel, b, f, p); }, num_samples,
      seed, zero_tol);
}

namespace detail {

inline std::vector<int> without(const std::vector<int>& s, int drop) {
  std::vector<int> out;
  for (int v : s)
    if (v != drop) out.push_back(v);
  return out;
}

inline std::vector<int> sorted_with(std::vector<int> s, int add) {
  s.insert(std::lower_bound(s.begin(), s.end(), add), add);
  return s;
}

// Unit moves (one index shifted by +-1 into a free slot) from `from` to `to`.
inline std::vector<std::vector<int>> unit_path(std::vector<int> from, const std::vector<int>& to) {
  std::vector<std::vector<int>> path{from};
  const int p = static_cast<int>(from.size());
  bool moved = true;
  while (from != to && moved) {
    moved = false;
    for (int k = p - 1; k >= 0 && !moved; --k) {
      auto& v = from[static_cast<std::size_t>(k)];
      const bool free_up = k == p - 1 || from[static_cast<std::size_t>(k + 1)] > v + 1;
      if (v < to[static_cast<std::size_t>(k)] && free_up) { ++v; moved = true; }
    }
    for (int k = 0; k < p && !moved; ++k) {
      auto& v = from[static_cast<std::size_t>(k)];
      const bool free_down = k == 0 || from[static_cast<std::size_t>(k - 1)] < v - 1;
      if (v > to[static_cast<std::size_t>(k)] && free_down) { --v; moved = true; }
    }
    if (moved) path.push_back(from);
  }
  return path;
}

// Cofactor null vector of a k x (k+1) block: c_j = (-1)^j det(block without column j).
inline std::vector<double> cofactor_null(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<double> c(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto rest = without(cols, cols[j]);
    const double d = rows.empty() ? 1.0 : minor(a, rows, rest);
    c[j] = (j % 2 == 0) ? d : -d;
  }
  return c;
}

inline std::optional<Counterexample> finish_witness(const Matrix& a, const std::vector<int>& support,
                                                    const std::vector<double>& coeffs, int r, double zero_tol) {
  Vector x = Vector::Zero(a.cols());
  for (std::size_t k = 0; k < support.size(); ++k) x[support[k]] = coeffs[k];
  const double scale = x.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return std::nullopt;
  x /= scale;
  const Vector ax = apply_snapped(a, x, zero_tol);
  const auto before = sign_report(x, zero_tol);
  const auto after = sign_report(ax, zero_tol);
  if (before.s_minus <= r - 1 && after.s_plus >= r) return Counterexample{x, ax, before, after, "constructed", {}};
  return std::nullopt;
}

inline std::optional<Counterexample> zero_minor_witness(const Matrix& a, const std::vector<int>& rows,
                                                        const std::vector<int>& cols, double zero_tol) {
  const int r = static_cast<int>(rows.size());
  Matrix block(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) block(i, j) = a(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
  Eigen::JacobiSVD<Matrix> svd(block, Eigen::ComputeFullV);
  const Vector v = svd.matrixV().col(r - 1);
  std::vector<double> coeffs(v.data(), v.data() + v.size());
  return finish_witness(a, cols, coeffs, r, zero_tol);
}

}  // namespace detail

/// Builds x with s-(x) <= r-1 and s+(Ax) >= r whenever A is not SSR_r.
///
/// Zero minor: a null vector of that r x r block, so Ax vanishes on r rows.
/// Opposite signs: walk from the positive to the negative witness by unit
/// moves of one row or column index. At the first sign flip the two minors
/// differ in adjacent indices i, i+1:
///   columns  x = cofactor null vector of A(alpha | gamma + {i, i+1}); its
///            i and i+1 entries share a sign, Ax vanishes on alpha
///   rows     x = cofactor null vector of A(gamma | beta); Ax vanishes on
///            gamma and changes sign strictly between rows i and i+1
inline std::optional<Counterexample> construct_ssr_witness(const Matrix& a, int r, double tol = kDefaultTol) {
  const auto verdict = ssr_verdict(a, r, tol);
  if (verdict.strict()) return std::nullopt;
  const double zero_tol = kDefaultTol;
  auto minor_sign = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
    const double v = minor(a, rows, cols);
    if (std::abs(v) <= tol * minor_scale(a, rows, cols)) return 0;
    return v > 0 ? 1 : -1;
  };
  auto as_vec = [](const IndexSet& s) { return std::vector<int>(s.indices().begin(), s.indices().end()); };

  if (verdict.status == SsrStatus::weakly_signed) {
    const auto& w = verdict.witness.front();
    return detail::zero_minor_witness(a, as_vec(w.rows), as_vec(w.cols), zero_tol);
  }

  const auto a1 = as_vec(verdict.witness[0].rows), b1 = as_vec(verdict.witness[0].cols);
  const auto a2 = as_vec(verdict.witness[1].rows), b2 = as_vec(verdict.witness[1].cols);
  std::vector<std::pair<std::vector<int>, std::vector<int>>> path;
  for (const auto& rows : detail::unit_path(a1, a2)) path.emplace_back(rows, b1);
  const auto col_path = detail::unit_path(b1, b2);
  for (std::size_t k = 1; k < col_path.size(); ++k) path.emplace_back(a2, col_path[k]);

  int prev_sign = minor_sign(path.front().first, path.front().second);
  for (std::size_t k = 1; k < path.size(); ++k) {
    const auto& [rows, cols] = path[k];
    const int s = minor_sign(rows, cols);
    if (s == 0) return detail::zero_minor_witness(a, rows, cols, zero_tol);
    if (s != prev_sign) {
      const auto& [prev_rows, prev_cols] = path[k - 1];
      if (prev_rows == rows) {
        std::vector<int> both = prev_cols;
        for (int c : cols)
          if (!std::binary_search(prev_cols.begin(), prev_cols.end(), c)) both = detail::sorted_with(both, c);
        return detail::finish_witness(a, both, detail::cofactor_null(a, rows, both), r, zero_tol);
      }
      std::vector<int> common;
      for (int i : rows)
        if (std::binary_search(prev_rows.begin(), prev_rows.end(), i)) common.push_back(i);
      return detail::finish_witness(a, cols, detail::cofactor_null(a, common, cols), r, zero_tol);
    }
    prev_sign = s;
  }
  return std::nullopt;
}

namespace detail {

inline void require_square(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorCode::dimension_mismatch, "property check needs a non-empty square matrix");
}

inline void require_nonsingular(const Matrix& a, double tol) {
  require_square(a);
  double hadamard = 1.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) hadamard *= a.row(i).norm();
  if (!(std::abs(determinant(a)) > tol * hadamard))
    throw Error(ErrorCode::singular_matrix, "matrix is singular to working tolerance");
}

inline VdpVerdict finish(Property prop, int p, bool holds, const Matrix& a, const ViolationTest& test,
                         std::optional<Counterexample> constructed, const VdpOptions& opt) {
  VdpVerdict v;
  v.property = prop;
  v.p = p;
  v.holds = holds;
  v.num_samples = opt.num_samples;
  v.seed = opt.seed;
  if (opt.num_samples > 0) {
    auto sampled = sample_counterexample(a, test, opt.num_samples, opt.seed);
    v.sampling_agrees = holds != sampled.has_value();
    if (!holds && sampled) v.counterexample = std::move(sampled);
  }
  if (!holds && !v.counterexample && constructed && test(constructed->before, constructed->after))
    v.counterexample = std::move(constructed);
  return v;
}

}  // namespace detail

inline VdpVerdict check_nonstandard_vdp(const Matrix& a, int p, const VdpOptions& opt = {}) {
  detail::require_nonsingular(a, opt.tol);
  const int n = static_cast<int>(a.rows());
  if (p < 0 || p > n - 1) throw Error(ErrorCode::order_out_of_range, "nonstandard VDP needs 0 <= p <= n-1");
  const bool holds = ssr_verdict(a, p + 1, opt.tol).strict();
  auto test = [p](const SignCountReport& b, const SignCountReport& f) {
    return violates(Relation::nonstandard, b, f, p);
  };
  return detail::finish(Property::nonstandard, p, holds, a, test,
                        holds ? std::nullopt : construct_ssr_witness(a, p + 1, opt.tol), opt);
}

inline VdpVerdict check_scvdp(const Matrix& a, const VdpOptions& opt = {}) {
  detail::require_nonsingular(a, opt.tol);
  const int n = static_cast<int>(a.rows());
  int failing = 0;
  for (int r = 1; r <= n && failing == 0; r += 2)
    if (!ssr_verdict(a, r, opt.tol).strict()) failing = r;
  auto test = [](const SignCountReport& b, const SignCountReport& f) {
    return violates(Relation::cyclic_strong, b, f);
  };
  return detail::finish(Property::scvdp, 0, failing == 0, a, test,
                        failing ? construct_ssr_witness(a, failing, opt.tol) : std::nullopt, opt);
}

inline VdpVerdict check_weak_cvdp(const Matrix& a, const VdpOptions& opt = {}) {
  detail::require_nonsingular(a, opt.tol);
  const int n = static_cast<int>(a.rows());
  bool holds = true;
  for (int r = 1; r <= n && holds; r += 2) holds = ssr_verdict(a, r, opt.tol).weak_or_strict();
  auto test = [](const SignCountReport& b, const SignCountReport& f) {
    return violates(Relation::cyclic_weak, b, f);
  };
  return detail::finish(Property::weak_cvdp, 0, holds, a, test, std::nullopt, opt);
}

inline VdpVerdict check_svdp(const Matrix& a, const VdpOptions& opt = {}) {
  detail::require_nonsingular(a, opt.tol);
  const int n = static_cast<int>(a.rows());
  int failing = 0;
  for (int k = 1; k <= n && failing == 0; ++k)
    if (!ssr_verdict(a, k, opt.tol).strict()) failing = k;
  auto test = [](const SignCountReport& b, const SignCountReport& f) { return violates(Relation::strong, b, f); };
  return detail::finish(Property::svdp, 0, failing == 0, a, test,
                        failing ? construct_ssr_witness(a, failing, opt.tol) : std::nullopt, opt);
}

/// n x m matrix U with m < n: s+(Uc) <= m-1 for every c != 0 iff U is SSR_m.
inline VdpVerdict check_prop_sv1(const Matrix& u, const VdpOptions& opt = {}) {
  const int n = static_cast<int>(u.rows());
  const int m = static_cast<int>(u.cols());
  if (m < 1 || m >= n) throw Error(ErrorCode::shape_error, "column-span criterion needs an n x m matrix with 1 <= m < n");
  const bool holds = ssr_verdict(u, m, opt.tol).strict();
  auto test = [m](const SignCountReport&, const SignCountReport& f) { return f.s_plus > m - 1; };
  auto v = detail::finish(Property::prop_sv1, m, holds, u, test,
                          holds ? std::nullopt : construct_ssr_witness(u, m, opt.tol), opt);
  return v;
}

/// F(y)_ij = exp(-(i-j)^2 y); totally positive for y > 0, tends to I.
inline Matrix gaussian_kernel(int n, double y) {
  if (!(y > 0.0)) throw Error(ErrorCode::nonpositive_parameter, "Gaussian kernel parameter must be positive");
  if (n < 1) throw Error(ErrorCode::dimension_mismatch, "Gaussian kernel dimension must be positive");
  Matrix f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = std::exp(-static_cast<double>((i - j) * (i - j)) * y);
  return f;
}

}  // namespace cvdp
