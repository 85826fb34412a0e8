#pragma once

// Sign-variation counters of a real sequence.
//
//   s_minus  : alternations after deleting zeros
//   s_plus   : maximal alternations over all +/-1 replacements of zeros
//   sc_minus : cyclic s_minus (entries placed on a ring)
//   sc_plus  : cyclic s_plus
//
// All counters threshold the input: an entry is zero iff |x| <= zero_tol.

#include "cvdp/error.hpp"
#include "cvdp/matrix.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cvdp {

struct SignCountReport {
  std::optional<int> sigma;  // present iff the vector lies in V
  int s_minus = 0;
  int s_plus = 0;
  int sc_minus = 0;
  int sc_plus = 0;
  bool in_V = false;
  bool in_Vc = false;

  bool operator==(const SignCountReport&) const = default;
};

inline int sign_of(double x, double zero_tol = kDefaultTol) {
  if (x > zero_tol) return 1;
  if (x < -zero_tol) return -1;
  return 0;
}

inline std::vector<int> sign_pattern(std::span<const double> v, double zero_tol = kDefaultTol) {
  std::vector<int> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(sign_of(x, zero_tol));
  return out;
}

namespace detail {

inline void require_nonempty(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorCode::dimension_mismatch, "sign counters need a vector of dimension >= 1");
}

inline int s_minus_of_signs(const std::vector<int>& s) {
  int count = 0;
  int last = 0;
  for (int x : s) {
    if (x == 0) continue;
    if (last != 0 && x != last) ++count;
    last = x;
  }
  return count;
}

// Linear scan. An interior zero run of length L spans L+1 transitions
// between its flanking signs a and b; all of them can alternate only when
// a*b == (-1)^(L+1), otherwise one transition is lost. Boundary runs are
// free at one end and contribute L.
inline int s_plus_of_signs(const std::vector<int>& s) {
  int count = 0;
  int prev = 0;
  int run = 0;
  for (int x : s) {
    if (x == 0) {
      ++run;
      continue;
    }
    if (prev == 0) {
      count += run;
    } else {
      const int transitions = run + 1;
      const bool parity_fits = ((transitions % 2) == 0) == (prev == x);
      count += parity_fits ? transitions : transitions - 1;
    }
    prev = x;
    run = 0;
  }
  if (prev == 0) return static_cast<int>(s.size()) - 1;
  return count + run;
}

inline bool in_V_signs(const std::vector<int>& s) {
  const std::size_t n = s.size();
  if (s.front() == 0 || s.back() == 0) return false;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (s[i] == 0 && s[i - 1] * s[i + 1] >= 0) return false;
  return true;
}

// Cyclic counts are the non-cyclic ones rounded up to the next even number.
inline int round_up_even(int k) { return k + (k % 2); }

}  // namespace detail

inline int s_minus(std::span<const double> v, double zero_tol = kDefaultTol) {
  detail::require_nonempty(v);
  return detail::s_minus_of_signs(sign_pattern(v, zero_tol));
}

inline int s_plus(std::span<const double> v, double zero_tol = kDefaultTol) {
  detail::require_nonempty(v);
  return detail::s_plus_of_signs(sign_pattern(v, zero_tol));
}

inline bool in_V(std::span<const double> v, double zero_tol = kDefaultTol) {
  detail::require_nonempty(v);
  return detail::in_V_signs(sign_pattern(v, zero_tol));
}

/// Number of strict alternations of a vector in V; interior zeros are bridged
/// by their (opposite-signed) neighbours. Throws NotInV otherwise.
inline int sigma(std::span<const double> v, double zero_tol = kDefaultTol) {
  detail::require_nonempty(v);
  const auto s = sign_pattern(v, zero_tol);
  if (!detail::in_V_signs(s))
    throw Error(ErrorCode::not_in_v, "vector is not in V: zero endpoint or unbridged interior zero");
  return detail::s_minus_of_signs(s);
}

inline int sc_minus(std::span<const double> v, double zero_tol = kDefaultTol) {
  return detail::round_up_even(s_minus(v, zero_tol));
}

inline int sc_plus(std::span<const double> v, double zero_tol = kDefaultTol) {
  return detail::round_up_even(s_plus(v, zero_tol));
}

inline SignCountReport sign_report(std::span<const double> v, double zero_tol = kDefaultTol) {
  detail::require_nonempty(v);
  const auto s = sign_pattern(v, zero_tol);
  SignCountReport r;
  r.s_minus = detail::s_minus_of_signs(s);
  r.s_plus = detail::s_plus_of_signs(s);
  r.sc_minus = detail::round_up_even(r.s_minus);
  r.sc_plus = detail::round_up_even(r.s_plus);
  r.in_V = r.s_minus == r.s_plus;
  r.in_Vc = r.sc_minus == r.sc_plus;
  if (detail::in_V_signs(s)) r.sigma = r.s_minus;
  return r;
}

inline int s_minus(const Vector& v, double zero_tol = kDefaultTol) { return s_minus(as_span(v), zero_tol); }
inline int s_plus(const Vector& v, double zero_tol = kDefaultTol) { return s_plus(as_span(v), zero_tol); }
inline int sc_minus(const Vector& v, double zero_tol = kDefaultTol) { return sc_minus(as_span(v), zero_tol); }
inline int sc_plus(const Vector& v, double zero_tol = kDefaultTol) { return sc_plus(as_span(v), zero_tol); }
inline int sigma(const Vector& v, double zero_tol = kDefaultTol) { return sigma(as_span(v), zero_tol); }
inline SignCountReport sign_report(const Vector& v, double zero_tol = kDefaultTol) {
  return sign_report(as_span(v), zero_tol);
}

/// Counters of a vector judged relative to its own scale. Linear dynamics
/// leave sign patterns invariant under positive scaling, so trajectories that
/// decay or grow are monitored on v / max|v_i|.
inline SignCountReport scaled_sign_report(const Vector& v, double zero_tol = kDefaultTol) {
  const double scale = v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return sign_report(v, zero_tol);
  const Vector normalized = v / scale;
  return sign_report(normalized, zero_tol);
}

}  // namespace cvdp
