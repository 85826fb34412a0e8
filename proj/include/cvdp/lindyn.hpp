#pragma once

// Linear time-varying dynamics x' = A(t) x: transition matrices, compound
// dynamics, CVDS verification on a time grid and sign-count monitoring of
// solutions with event localization.

#include "cvdp/classify.hpp"
#include "cvdp/compound.hpp"
#include "cvdp/error.hpp"
#include "cvdp/expm.hpp"
#include "cvdp/matrix.hpp"
#include "cvdp/signvar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cvdp {

struct ConstantGenerator {
  Matrix a;
};

/// matrices[k] is active on [breakpoints[k-1], breakpoints[k]); the first
/// piece extends to -inf and the last to +inf.
struct PiecewiseConstantGenerator {
  std::vector<double> breakpoints;
  std::vector<Matrix> matrices;
};

enum class Interpolation { hold, linear };

struct SampledGenerator {
  std::vector<double> times;
  std::vector<Matrix> matrices;
  Interpolation interpolation = Interpolation::hold;
};

struct FunctionGenerator {
  std::function<Matrix(double)> f;
};

using Generator = std::variant<ConstantGenerator, PiecewiseConstantGenerator, SampledGenerator, FunctionGenerator>;

class LtvSystem {
 public:
  static LtvSystem constant(Matrix a) {
    require_square(a);
    const int n = static_cast<int>(a.rows());
    return LtvSystem(n, ConstantGenerator{std::move(a)});
  }

  static LtvSystem piecewise_constant(std::vector<double> breakpoints, std::vector<Matrix> matrices) {
    if (matrices.empty() || matrices.size() != breakpoints.size() + 1)
      throw Error(ErrorCode::shape_error, "piecewise generator needs one more matrix than breakpoints");
    require_increasing(breakpoints);
    const int n = require_same_square(matrices);
    return LtvSystem(n, PiecewiseConstantGenerator{std::move(breakpoints), std::move(matrices)});
  }

  static LtvSystem sampled(std::vector<double> times, std::vector<Matrix> matrices, Interpolation interp) {
    if (matrices.empty() || matrices.size() != times.size())
      throw Error(ErrorCode::shape_error, "sampled generator needs one matrix per sample time");
    require_increasing(times);
    const int n = require_same_square(matrices);
    return LtvSystem(n, SampledGenerator{std::move(times), std::move(matrices), interp});
  }

  static LtvSystem function(int n, std::function<Matrix(double)> f) {
    if (n < 1) throw Error(ErrorCode::dimension_mismatch, "system dimension must be positive");
    return LtvSystem(n, FunctionGenerator{std::move(f)});
  }

  int dim() const { return n_; }
  const Generator& generator() const { return gen_; }

  /// Constant between consecutive switch times, so exact per-piece
  /// exponentials apply.
  bool piecewise_constant() const {
    if (std::holds_alternative<ConstantGenerator>(gen_) || std::holds_alternative<PiecewiseConstantGenerator>(gen_))
      return true;
    if (const auto* s = std::get_if<SampledGenerator>(&gen_)) return s->interpolation == Interpolation::hold;
    return false;
  }

  /// Times where A(t) may jump or kink.
  const std::vector<double>& switch_times() const {
    static const std::vector<double> none;
    if (const auto* p = std::get_if<PiecewiseConstantGenerator>(&gen_)) return p->breakpoints;
    if (const auto* s = std::get_if<SampledGenerator>(&gen_)) return s->times;
    return none;
  }

  /// A(t), right-continuous at switch times.
  Matrix at(double t) const {
    return std::visit(
        [&](const auto& g) -> Matrix {
          using G = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<G, ConstantGenerator>) {
            return g.a;
          } else if constexpr (std::is_same_v<G, PiecewiseConstantGenerator>) {
            const auto k = std::upper_bound(g.breakpoints.begin(), g.breakpoints.end(), t) - g.breakpoints.begin();
            return g.matrices[static_cast<std::size_t>(k)];
          } else if constexpr (std::is_same_v<G, SampledGenerator>) {
            const auto& ts = g.times;
            if (t <= ts.front()) return g.matrices.front();
            if (t >= ts.back()) return g.matrices.back();
            const auto k = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
            if (g.interpolation == Interpolation::hold) return g.matrices[k];
            const double w = (t - ts[k]) / (ts[k + 1] - ts[k]);
            return (1.0 - w) * g.matrices[k] + w * g.matrices[k + 1];
          } else {
            Matrix a = g.f(t);
            if (a.rows() != n_ || a.cols() != n_)
              throw Error(ErrorCode::dimension_mismatch, "generator function returned a matrix of the wrong size");
            return a;
          }
        },
        gen_);
  }

  /// The system whose generator is A^[p](t).
  LtvSystem compound(int p) const {
    auto comp = [p](const Matrix& a) { return add_compound(a, p).entries; };
    const int dim = static_cast<int>(binomial(n_, p));
    return std::visit(
        [&](const auto& g) -> LtvSystem {
          using G = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<G, ConstantGenerator>) {
            return LtvSystem(dim, ConstantGenerator{comp(g.a)});
          } else if constexpr (std::is_same_v<G, FunctionGenerator>) {
            auto f = g.f;
            return LtvSystem(dim, FunctionGenerator{[f, comp](double t) { return comp(f(t)); }});
          } else {
            auto h = g;
            for (auto& m : h.matrices) m = comp(m);
            return LtvSystem(dim, std::move(h));
          }
        },
        gen_);
  }

 private:
  LtvSystem(int n, Generator g) : n_(n), gen_(std::move(g)) {}

  static void require_square(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0)
      throw Error(ErrorCode::dimension_mismatch, "generator must be a non-empty square matrix");
  }

  static int require_same_square(const std::vector<Matrix>& ms) {
    for (const auto& m : ms) {
      require_square(m);
      if (m.rows() != ms.front().rows())
        throw Error(ErrorCode::dimension_mismatch, "all generator matrices must share one size");
    }
    return static_cast<int>(ms.front().rows());
  }

  static void require_increasing(const std::vector<double>& ts) {
    for (std::size_t k = 1; k < ts.size(); ++k)
      if (!(ts[k] > ts[k - 1])) throw Error(ErrorCode::invalid_argument, "time points must be strictly increasing");
  }

  int n_ = 0;
  Generator gen_;
};

enum class Integrator { automatic, rk4, exact };

inline constexpr double kDefaultStep = 1e-3;

namespace detail {

// Splits [t0, t1] at the switch times of the system.
inline std::vector<double> segment_points(const LtvSystem& sys, double t0, double t1) {
  std::vector<double> pts{t0};
  for (double b : sys.switch_times())
    if (b > t0 && b < t1) pts.push_back(b);
  pts.push_back(t1);
  return pts;
}

inline bool use_exact(const LtvSystem& sys, Integrator method) {
  if (method == Integrator::exact) {
    if (!sys.piecewise_constant())
      throw Error(ErrorCode::invalid_argument, "exact integration needs a piecewise-constant generator");
    return true;
  }
  return method == Integrator::automatic && sys.piecewise_constant();
}

// Advances the columns of y from t0 to t1 (no step-size precondition).
inline Matrix propagate(const LtvSystem& sys, double t0, double t1, Matrix y, double step, Integrator method) {
  if (t1 <= t0) return y;
  const bool exact = use_exact(sys, method);
  const bool frozen = sys.piecewise_constant();
  const auto pts = segment_points(sys, t0, t1);
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const double a = pts[s], b = pts[s + 1];
    if (exact) {
      y = expm(sys.at(0.5 * (a + b)), b - a) * y;
      continue;
    }
    const Matrix frozen_a = frozen ? sys.at(0.5 * (a + b)) : Matrix();
    auto gen = [&](double t) { return frozen ? frozen_a : sys.at(t); };
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil((b - a) / step - 1e-9)));
    const double h = (b - a) / static_cast<double>(steps);
    for (long k = 0; k < steps; ++k) {
      const double t = a + static_cast<double>(k) * h;
      const Matrix a0 = gen(t), am = gen(t + 0.5 * h), a1 = gen(t + h);
      const Matrix k1 = a0 * y;
      const Matrix k2 = am * (y + 0.5 * h * k1);
      const Matrix k3 = am * (y + 0.5 * h * k2);
      const Matrix k4 = a1 * (y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return y;
}

inline void check_horizon(double t0, double t, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::nonpositive_parameter, "integration step must be positive");
  if (t < t0) throw Error(ErrorCode::invalid_argument, "final time precedes initial time");
  if (t > t0 && step > t - t0) throw Error(ErrorCode::step_too_large, "integration step exceeds the horizon");
}

}  // namespace detail

/// Phi(t, t0): solution of Phi' = A(t) Phi, Phi(t0) = I. Piecewise-constant
/// generators are integrated exactly per piece unless rk4 is requested.
inline Matrix transition_matrix(const LtvSystem& sys, double t0, double t, double step = kDefaultStep,
                                Integrator method = Integrator::automatic) {
  detail::check_horizon(t0, t, step);
  const int n = sys.dim();
  return detail::propagate(sys, t0, t, Matrix::Identity(n, n), step, method);
}

/// Phi^(p)(t, t0) obtained by integrating the compound system with generator
/// A^[p](t).
inline CompoundMatrix compound_transition(const LtvSystem& sys, int p, double t0, double t,
                                          double step = kDefaultStep, Integrator method = Integrator::automatic) {
  const int n = sys.dim();
  if (p < 1 || p > n) throw Error(ErrorCode::order_out_of_range, "compound order must satisfy 1 <= p <= n");
  CompoundMatrix out;
  out.order = p;
  out.ambient_dim = n;
  out.ambient_cols = n;
  out.kind = CompoundKind::multiplicative;
  out.entries = transition_matrix(sys.compound(p), t0, t, step, method);
  return out;
}

struct MinorViolation {
  double t = 0.0;
  int order = 0;
  IndexSet rows;
  IndexSet cols;
  double value = 0.0;

  bool operator==(const MinorViolation&) const = default;
};

struct CvdsVerdict {
  bool holds = true;
  std::optional<MinorViolation> first_violation;

  bool operator==(const CvdsVerdict&) const = default;
};

/// Returns the first minor of Phi of an order in `orders` that is not
/// > tol * (max |entry| of its submatrix)^k, scanning orders in the given
/// sequence and index sets lexicographically.
inline std::optional<MinorViolation> first_nonpositive_minor(const Matrix& phi, const std::vector<int>& orders,
                                                             double tol, double t = 0.0) {
  const int n = static_cast<int>(phi.rows());
  for (int k : orders) {
    std::optional<MinorViolation> found;
    for_each_index_set(n, k, [&](const std::vector<int>& rows, std::size_t) {
      if (found) return;
      for_each_index_set(n, k, [&](const std::vector<int>& cols, std::size_t) {
        if (found) return;
        const double v = minor(phi, rows, cols);
        if (!(v > tol * minor_scale(phi, rows, cols))) found = MinorViolation{t, k, IndexSet(rows, n), IndexSet(cols, n), v};
      });
    });
    if (found) return found;
  }
  return std::nullopt;
}

inline std::vector<int> odd_orders(int n) {
  std::vector<int> out;
  for (int k = 1; k <= n; k += 2) out.push_back(k);
  return out;
}

inline std::vector<int> all_orders(int n) {
  std::vector<int> out;
  for (int k = 1; k <= n; ++k) out.push_back(k);
  return out;
}

namespace detail {

inline CvdsVerdict verify_minors(const LtvSystem& sys, double t0, const std::vector<double>& grid, double step,
                                 double tol, Integrator method, const std::vector<int>& orders) {
  if (!(step > 0.0)) throw Error(ErrorCode::nonpositive_parameter, "integration step must be positive");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > t0) || (k > 0 && !(grid[k] > grid[k - 1])))
      throw Error(ErrorCode::invalid_argument, "grid must be strictly increasing and after t0");
  }
  CvdsVerdict out;
  const int n = sys.dim();
  Matrix phi = Matrix::Identity(n, n);
  double t_prev = t0;
  for (double t : grid) {
    phi = propagate(sys, t_prev, t, phi, step, method);
    t_prev = t;
    if (auto v = first_nonpositive_minor(phi, orders, tol, t)) {
      out.holds = false;
      out.first_violation = v;
      return out;
    }
  }
  return out;
}

}  // namespace detail

/// Every odd-order minor of Phi(t, t0) positive at every grid time. Minors
/// are computed afresh from Phi.
inline CvdsVerdict verify_cvds(const LtvSystem& sys, double t0, const std::vector<double>& grid,
                               double step = kDefaultStep, double tol = 0.0,
                               Integrator method = Integrator::automatic) {
  return detail::verify_minors(sys, t0, grid, step, tol, method, odd_orders(sys.dim()));
}

/// Every minor of Phi(t, t0) positive at every grid time.
inline CvdsVerdict verify_tpds(const LtvSystem& sys, double t0, const std::vector<double>& grid,
                               double step = kDefaultStep, double tol = 0.0,
                               Integrator method = Integrator::automatic) {
  return detail::verify_minors(sys, t0, grid, step, tol, method, all_orders(sys.dim()));
}

enum class EventKind { sc_minus_drop, sc_minus_rise, s_minus_increase, s_minus_decrease };

inline std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::sc_minus_drop: return "sc_minus_drop";
    case EventKind::sc_minus_rise: return "sc_minus_rise";
    case EventKind::s_minus_increase: return "s_minus_increase";
    case EventKind::s_minus_decrease: return "s_minus_decrease";
  }
  return "sc_minus_drop";
}

struct SignEvent {
  double t_lo = 0.0;
  double t_hi = 0.0;
  EventKind kind = EventKind::sc_minus_drop;
  SignCountReport before;
  SignCountReport after;

  bool operator==(const SignEvent&) const = default;
};

inline EventKind classify_event(const SignCountReport& before, const SignCountReport& after) {
  if (after.sc_minus < before.sc_minus) return EventKind::sc_minus_drop;
  if (after.sc_minus > before.sc_minus) return EventKind::sc_minus_rise;
  return after.s_minus > before.s_minus ? EventKind::s_minus_increase : EventKind::s_minus_decrease;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Matrix> phi;  // empty unless requested
  std::vector<SignCountReport> counts;
  std::vector<SignEvent> events;
  std::optional<double> observed_settling_time;  // start of the final stretch with sc_minus == sc_plus
};

namespace detail {

inline bool counts_differ(const SignCountReport& a, const SignCountReport& b) {
  return a.s_minus != b.s_minus || a.sc_minus != b.sc_minus;
}

/// Localizes every change of (s-, sc-) between two samples. `advance(t, x, dt)`
/// returns the state at t + dt; `report(x)` returns its counters. Each change
/// is bracketed to width <= bracket by bisection from the left endpoint.
template <class Advance, class Report>
void localize_events(double tl, Vector xl, SignCountReport cl, double tr, const SignCountReport& cr, double bracket,
                     const Advance& advance, const Report& report, std::vector<SignEvent>& out) {
  while (counts_differ(cl, cr)) {
    double lo = tl, hi = tr;
    Vector x_lo = xl;
    SignCountReport c_hi = cr;
    Vector x_hi;
    bool have_hi = false;
    while (hi - lo > bracket) {
      const double mid = 0.5 * (lo + hi);
      Vector xm = advance(lo, x_lo, mid - lo);
      const auto cm = report(xm);
      if (counts_differ(cm, cl)) {
        hi = mid;
        c_hi = cm;
        x_hi = std::move(xm);
        have_hi = true;
      } else {
        lo = mid;
        x_lo = std::move(xm);
      }
    }
    if (!have_hi) x_hi = advance(lo, x_lo, hi - lo);
    out.push_back(SignEvent{lo, hi, classify_event(cl, c_hi), cl, c_hi});
    if (hi >= tr) break;
    tl = hi;
    xl = std::move(x_hi);
    cl = c_hi;
  }
}

inline std::optional<double> settling_time(const std::vector<double>& times,
                                           const std::vector<SignCountReport>& counts) {
  std::optional<double> out;
  for (std::size_t k = counts.size(); k-- > 0;) {
    if (counts[k].sc_minus != counts[k].sc_plus) break;
    out = times[k];
  }
  return out;
}

inline std::vector<double> uniform_grid(double t0, double t1, double step) {
  std::vector<double> ts{t0};
  const auto steps = static_cast<long>(std::ceil((t1 - t0) / step - 1e-9));
  for (long k = 1; k < steps; ++k) ts.push_back(t0 + static_cast<double>(k) * step);
  ts.push_back(t1);
  return ts;
}

}  // namespace detail

struct SimulateOptions {
  double zero_tol = kDefaultTol;
  double event_bracket = 1e-6;
  bool store_phi = false;
  Integrator method = Integrator::automatic;
  double abort_norm = 1e12;
};

/// Integrates x' = A(t) x on the grid t0, t0 + step, ..., t1 and records the
/// sign counters of every state (judged relative to max |x_i|) plus events.
inline Trajectory simulate(const LtvSystem& sys, const Vector& x0, double t0, double t1, double step = kDefaultStep,
                           const SimulateOptions& opt = {}) {
  if (x0.size() != sys.dim()) throw Error(ErrorCode::dimension_mismatch, "initial state has the wrong dimension");
  if (x0.size() == 0 || x0.cwiseAbs().maxCoeff() <= opt.zero_tol)
    throw Error(ErrorCode::zero_initial_condition, "initial state is zero");
  if (!(t1 > t0)) throw Error(ErrorCode::invalid_argument, "simulation horizon must satisfy t1 > t0");
  detail::check_horizon(t0, t1, step);

  const int n = sys.dim();
  const bool exact = detail::use_exact(sys, opt.method);
  auto report = [&](const Vector& x) { return scaled_sign_report(x, opt.zero_tol); };

  // Exact steps of the common length reuse one exponential when A is constant.
  const bool constant = std::holds_alternative<ConstantGenerator>(sys.generator());
  const Matrix a_const = constant ? sys.at(t0) : Matrix();
  double cached_h = -1.0;
  Matrix cached_e;
  auto step_matrix = [&](double t, double dt) -> Matrix {
    if (exact && constant) {
      if (dt != cached_h) {
        cached_h = dt;
        cached_e = expm(a_const, dt);
      }
      return cached_e;
    }
    return detail::propagate(sys, t, t + dt, Matrix::Identity(n, n), step, opt.method);
  };
  auto advance = [&](double t, const Vector& x, double dt) -> Vector {
    return detail::propagate(sys, t, t + dt, Matrix(x), step, opt.method).col(0);
  };

  Trajectory tr;
  tr.times = detail::uniform_grid(t0, t1, step);
  Vector x = x0;
  Matrix phi = Matrix::Identity(n, n);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    if (k > 0) {
      const double dt = tr.times[k] - tr.times[k - 1];
      const Matrix e = step_matrix(tr.times[k - 1], dt);
      x = e * x;
      if (opt.store_phi) phi = e * phi;
    }
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > opt.abort_norm)
      throw Error(ErrorCode::numerical_abort, "state norm exceeded the abort threshold at t = " +
                                                  std::to_string(tr.times[k]));
    tr.states.push_back(x);
    tr.counts.push_back(report(x));
    if (opt.store_phi) tr.phi.push_back(phi);
    if (k > 0)
      detail::localize_events(tr.times[k - 1], tr.states[k - 1], tr.counts[k - 1], tr.times[k], tr.counts[k],
                              opt.event_bracket, advance, report, tr.events);
  }
  tr.observed_settling_time = detail::settling_time(tr.times, tr.counts);
  return tr;
}

/// True iff every entry of Phi(t, t0) exceeds tol. Throws NotMetzler when a
/// sampled generator value has a negative off-diagonal entry.
inline bool check_positivity_condition(const LtvSystem& sys, double t0, double t, double step = kDefaultStep,
                                       double tol = 0.0, Integrator method = Integrator::automatic) {
  detail::check_horizon(t0, t, step);
  const auto pts = detail::segment_points(sys, t0, t);
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const double a = pts[s], b = pts[s + 1];
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil((b - a) / step - 1e-9)));
    const long samples = sys.piecewise_constant() ? 0 : 2 * steps;
    for (long k = 0; k <= samples; ++k) {
      const double tk = samples == 0 ? 0.5 * (a + b) : a + (b - a) * static_cast<double>(k) / static_cast<double>(samples);
      if (!is_metzler(sys.at(tk), 0.0))
        throw Error(ErrorCode::not_metzler, "generator is not Metzler at t = " + std::to_string(tk));
    }
  }
  const Matrix phi = transition_matrix(sys, t0, t, step, method);
  return (phi.array() > tol).all();
}

}  // namespace cvdp
