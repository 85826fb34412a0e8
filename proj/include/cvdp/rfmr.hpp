#pragma once

// Ribosome flow model on a ring:
//   x_i' = l_{i-1} x_{i-1} (1 - x_i) - l_i x_i (1 - x_{i+1}),  indices mod n
// with its Jacobian and the variational system z' = J(x(t)) z integrated
// jointly with x.

#include "cvdp/classify.hpp"
#include "cvdp/error.hpp"
#include "cvdp/lindyn.hpp"
#include "cvdp/matrix.hpp"
#include "cvdp/signvar.hpp"

#include <cmath>
#include <vector>

namespace cvdp {

struct RfmrParams {
  std::vector<double> lambda;

  int n() const { return static_cast<int>(lambda.size()); }
};

inline void validate(const RfmrParams& p) {
  if (p.n() < 2) throw Error(ErrorCode::dimension_mismatch, "ring needs at least two sites");
  for (double l : p.lambda)
    if (!(l > 0.0)) throw Error(ErrorCode::nonpositive_parameter, "transition rates must be positive");
}

namespace detail {

inline void require_unit_cube(const RfmrParams& p, const Vector& x) {
  if (x.size() != p.n()) throw Error(ErrorCode::dimension_mismatch, "state dimension does not match the ring size");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x[i] >= 0.0 && x[i] <= 1.0)) throw Error(ErrorCode::out_of_unit_cube, "state leaves [0,1]^n");
}

inline Eigen::Index prev(Eigen::Index i, Eigen::Index n) { return (i + n - 1) % n; }
inline Eigen::Index next(Eigen::Index i, Eigen::Index n) { return (i + 1) % n; }

inline Vector rfmr_flows_unchecked(const RfmrParams& p, const Vector& x) {
  const auto n = x.size();
  Vector f(n);
  for (Eigen::Index i = 0; i < n; ++i) f[i] = p.lambda[static_cast<std::size_t>(i)] * x[i] * (1.0 - x[next(i, n)]);
  return f;
}

inline Vector rfmr_rhs_unchecked(const RfmrParams& p, const Vector& x) {
  const Vector f = rfmr_flows_unchecked(p, x);
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = f[prev(i, x.size())] - f[i];
  return out;
}

inline Matrix rfmr_jacobian_unchecked(const RfmrParams& p, const Vector& x) {
  const auto n = x.size();
  Matrix j = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto im = prev(i, n), ip = next(i, n);
    const double l_in = p.lambda[static_cast<std::size_t>(im)];
    const double l_out = p.lambda[static_cast<std::size_t>(i)];
    // inflow l_in x_{i-1} (1 - x_i), outflow l_out x_i (1 - x_{i+1})
    j(i, im) += l_in * (1.0 - x[i]);
    j(i, i) -= l_in * x[im];
    j(i, i) -= l_out * (1.0 - x[ip]);
    j(i, ip) += l_out * x[i];
  }
  return j;
}

}  // namespace detail

/// Per-link flow l_i x_i (1 - x_{i+1}) from site i to site i+1.
inline Vector rfmr_flows(const RfmrParams& p, const Vector& x) {
  validate(p);
  detail::require_unit_cube(p, x);
  return detail::rfmr_flows_unchecked(p, x);
}

inline Vector rfmr_rhs(const RfmrParams& p, const Vector& x) {
  validate(p);
  detail::require_unit_cube(p, x);
  return detail::rfmr_rhs_unchecked(p, x);
}

/// J = M - D: off-diagonal (i, i-1) = l_{i-1}(1 - x_i), (i, i+1) = l_i x_i,
/// diagonal -(l_{i-1} x_{i-1} + l_i (1 - x_{i+1})).
inline Matrix rfmr_jacobian(const RfmrParams& p, const Vector& x) {
  validate(p);
  detail::require_unit_cube(p, x);
  return detail::rfmr_jacobian_unchecked(p, x);
}

struct RfmrOptions {
  double zero_tol = kDefaultTol;
  double event_bracket = 1e-6;
  double clamp_tol = 1e-9;
};

struct RfmrRun {
  Trajectory x;
  Trajectory z;  // sign counters and events refer to z
  std::vector<Vector> flows;
  std::vector<double> reducible_times;  // grid times where J(x) is reducible
  int clamps = 0;                       // steps that needed clamping to [0,1]
};

namespace detail {

inline Vector rfmr_joint_rhs(const RfmrParams& p, const Vector& w) {
  const auto n = static_cast<Eigen::Index>(p.n());
  const Vector x = w.head(n);
  Vector out(2 * n);
  out.head(n) = rfmr_rhs_unchecked(p, x);
  out.tail(n) = rfmr_jacobian_unchecked(p, x) * w.tail(n);
  return out;
}

inline Vector rfmr_rk4(const RfmrParams& p, const Vector& w, double h) {
  const Vector k1 = rfmr_joint_rhs(p, w);
  const Vector k2 = rfmr_joint_rhs(p, w + 0.5 * h * k1);
  const Vector k3 = rfmr_joint_rhs(p, w + 0.5 * h * k2);
  const Vector k4 = rfmr_joint_rhs(p, w + h * k3);
  return w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Clamps x to the cube when the overshoot is within tolerance.
inline bool clamp_to_cube(Vector& w, Eigen::Index n, double tol) {
  bool clamped = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double over = std::max(-w[i], w[i] - 1.0);
    if (over <= 0.0) continue;
    if (over > tol) throw Error(ErrorCode::numerical_abort, "state left [0,1]^n beyond the clamp tolerance");
    w[i] = std::clamp(w[i], 0.0, 1.0);
    clamped = true;
  }
  return clamped;
}

}  // namespace detail

/// Joint fixed-step RK4 of (x, z) so both see the same x samples.
inline RfmrRun simulate_with_variational(const RfmrParams& p, const Vector& x0, const Vector& z0, double t1,
                                         double step = kDefaultStep, const RfmrOptions& opt = {}) {
  validate(p);
  const auto n = static_cast<Eigen::Index>(p.n());
  if (x0.size() != n || z0.size() != n) throw Error(ErrorCode::dimension_mismatch, "initial state has the wrong size");
  detail::require_unit_cube(p, x0);
  if ((x0.array() == 0.0).all() || (x0.array() == 1.0).all())
    throw Error(ErrorCode::inadmissible_state, "initial state is one of the equilibria 0 or 1");
  if (z0.cwiseAbs().maxCoeff() <= opt.zero_tol)
    throw Error(ErrorCode::zero_initial_condition, "variational initial state is zero");
  if (!(t1 > 0.0)) throw Error(ErrorCode::invalid_argument, "horizon must be positive");
  detail::check_horizon(0.0, t1, step);

  RfmrRun run;
  const auto grid = detail::uniform_grid(0.0, t1, step);
  auto z_report = [&](const Vector& w) { return scaled_sign_report(Vector(w.tail(n)), opt.zero_tol); };
  auto advance = [&](double, const Vector& w, double dt) {
    Vector out = w;
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil(dt / step - 1e-9)));
    for (long k = 0; k < steps; ++k) {
      out = detail::rfmr_rk4(p, out, dt / static_cast<double>(steps));
      detail::clamp_to_cube(out, n, opt.clamp_tol);
    }
    return out;
  };

  Vector w(2 * n);
  w << x0, z0;
  std::vector<Vector> joint;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0) {
      w = detail::rfmr_rk4(p, w, grid[k] - grid[k - 1]);
      if (detail::clamp_to_cube(w, n, opt.clamp_tol)) ++run.clamps;
      if (!w.allFinite()) throw Error(ErrorCode::numerical_abort, "non-finite state");
    }
    const Vector x = w.head(n), z = w.tail(n);
    run.x.times.push_back(grid[k]);
    run.x.states.push_back(x);
    run.x.counts.push_back(sign_report(x, opt.zero_tol));
    run.z.times.push_back(grid[k]);
    run.z.states.push_back(z);
    run.z.counts.push_back(z_report(w));
    run.flows.push_back(detail::rfmr_flows_unchecked(p, x));
    if (!is_irreducible(detail::rfmr_jacobian_unchecked(p, x), 0.0)) run.reducible_times.push_back(grid[k]);
    joint.push_back(w);
    if (k > 0)
      detail::localize_events(grid[k - 1], joint[k - 1], run.z.counts[k - 1], grid[k], run.z.counts[k],
                              opt.event_bracket, advance, z_report, run.z.events);
  }
  run.z.observed_settling_time = detail::settling_time(run.z.times, run.z.counts);
  return run;
}

}  // namespace cvdp
