#pragma once

// Master-equation integration for the driven Lambda atom.
//
// Five jump channels act on rho: spontaneous emission |3>->|1> (Gamma31) and
// |3>->|2> (Gamma32), dephasing of |3> (gamma3_deph) and of |2> (gamma2_deph),
// and relaxation |2>->|1> (Gamma21). Each enters as (G/2)[2 L rho L^+ - L^+L rho - rho L^+L].

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ods/drive.hpp"
#include "ods/eigensystem.hpp"
#include "ods/errors.hpp"
#include "ods/quantum_core.hpp"

namespace ods {

struct DecoherenceRates {
  double gamma31_se = 0.5;    // |3> -> |1>
  double gamma32_se = 0.5;    // |3> -> |2>
  double gamma3_deph = 0.0;
  double gamma2_deph = 0.02;
  double gamma21_long = 0.002;  // |2> -> |1>

  /// Excited-state coherence decay, Gamma31 + Gamma32 + gamma3_deph.
  double gamma31() const noexcept { return gamma31_se + gamma32_se + gamma3_deph; }
  /// Ground-state coherence decay, Gamma21 + gamma2_deph.
  double gamma21() const noexcept { return gamma21_long + gamma2_deph; }

  static DecoherenceRates zero() { return {0.0, 0.0, 0.0, 0.0, 0.0}; }

  /// Unit excited-state width with Gamma21 = gamma2_deph / 10.
  static DecoherenceRates with_ground_dephasing(double gamma2_deph) {
    DecoherenceRates r;
    r.gamma2_deph = gamma2_deph;
    r.gamma21_long = gamma2_deph / 10.0;
    return r;
  }

  void validate() const {
    const auto check = [](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(name, "must be finite and >= 0");
    };
    check(gamma31_se, "gamma31_se");
    check(gamma32_se, "gamma32_se");
    check(gamma3_deph, "gamma3_deph");
    check(gamma2_deph, "gamma2_deph");
    check(gamma21_long, "gamma21_long");
  }

  bool operator==(const DecoherenceRates&) const = default;
};

enum class Frame { kFull, kEffective };

inline const char* to_string(Frame f) { return f == Frame::kFull ? "full" : "effective"; }

enum class Method { kRk4Fixed, kRk45Adaptive };

inline const char* to_string(Method m) { return m == Method::kRk4Fixed ? "rk4" : "rk45"; }

struct IntegratorConfig {
  Method method = Method::kRk45Adaptive;
  double step = 0.05;  // rk4 only
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double sample_interval = 0.0;  // 0: T/200 of the drive

  static constexpr double kDefaultSamplesPerPeriod = 200.0;

  void validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("step", "must be > 0");
    if (!(abs_tol > 0.0)) throw ValidationError("abs_tol", "must be > 0");
    if (!(rel_tol > 0.0)) throw ValidationError("rel_tol", "must be > 0");
    if (!(sample_interval >= 0.0) || !std::isfinite(sample_interval)) {
      throw ValidationError("sample_interval", "must be >= 0");
    }
  }

  bool operator==(const IntegratorConfig&) const = default;
};

/// d rho/dt = -i[H, rho] + dissipators.
///
/// The dissipators are applied element-wise: populations exchange through the
/// decay channels, and each coherence rho_ij decays at (k_i + k_j)/2 with
/// k_1 = 0, k_2 = gamma21, k_3 = gamma31.
inline Matrix3 lindblad_rhs(const Matrix3& rho, const Matrix3& h, const DecoherenceRates& rates) {
  Matrix3 d = -kI * (h * rho - rho * h);
  const std::array<double, 3> k{0.0, rates.gamma21(), rates.gamma31()};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) d(i, j) -= 0.5 * (k[i] + k[j]) * rho(i, j);
    }
  }
  const double p2 = rho(1, 1).real();
  const double p3 = rho(2, 2).real();
  d(0, 0) += rates.gamma31_se * p3 + rates.gamma21_long * p2;
  d(1, 1) += rates.gamma32_se * p3 - rates.gamma21_long * p2;
  d(2, 2) -= (rates.gamma31_se + rates.gamma32_se) * p3;
  return d;
}

inline Matrix3 lindblad_rhs(const DensityMatrix& rho, const Matrix3& h, const DecoherenceRates& rates) {
  return lindblad_rhs(rho.matrix(), h, rates);
}

struct Observables {
  double t = 0.0;
  double rho11 = 0.0;
  double rho22 = 0.0;
  double rho33 = 0.0;
  double re_rho21 = 0.0;
  double im_rho21 = 0.0;
  double abs_rho21_sq = 0.0;
  double dark_overlap = 0.0;  // <a0(t)|rho|a0(t)>; NaN when the drive is not ODS-valid
};

struct Trajectory {
  Frame frame = Frame::kFull;
  std::vector<double> times;
  std::vector<Matrix3> states;

  std::size_t size() const noexcept { return times.size(); }
  DensityMatrix state(std::size_t k) const { return DensityMatrix(states.at(k)); }
  const Matrix3& back() const { return states.back(); }
};

/// Observables of rho at time t. The dark state lives in the |1>,|2> block,
/// which both frames share when D' = 0.
inline Observables observe(double t, const Matrix3& rho, const DriveParams& params,
                           const RampSchedule& schedule) {
  Observables o;
  o.t = t;
  o.rho11 = rho(0, 0).real();
  o.rho22 = rho(1, 1).real();
  o.rho33 = rho(2, 2).real();
  o.re_rho21 = rho(1, 0).real();
  o.im_rho21 = rho(1, 0).imag();
  o.abs_rho21_sq = std::norm(rho(1, 0));
  if (params.is_ods_valid()) {
    const Vector3& a0 = dark_state(params, schedule, t).amplitudes();
    o.dark_overlap = a0.dot(rho * a0).real();
  } else {
    o.dark_overlap = std::nan("");
  }
  return o;
}

inline std::vector<Observables> observables(const Trajectory& traj, const DriveParams& params,
                                            const RampSchedule& schedule) {
  std::vector<Observables> out;
  out.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out.push_back(observe(traj.times[k], traj.states[k], params, schedule));
  }
  return out;
}

namespace detail {

using OdeState = std::array<double, 18>;

inline void pack(const Matrix3& m, OdeState& x) {
  for (int k = 0; k < 9; ++k) {
    const Complex c = m(k / 3, k % 3);
    x[2 * k] = c.real();
    x[2 * k + 1] = c.imag();
  }
}

inline Matrix3 unpack(const OdeState& x) {
  Matrix3 m;
  for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = Complex(x[2 * k], x[2 * k + 1]);
  return m;
}

inline bool finite(const OdeState& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Hermitizing x in place; the Lindblad generator commutes with the adjoint,
// so the same projection applied to dx/dt keeps the FSAL derivative exact.
inline void hermitize(OdeState& x) {
  Matrix3 m = unpack(x);
  pack(ods::hermitize(m), x);
}

inline constexpr double kPositivityFailure = 1e-6;

inline void check_sample(const Matrix3& rho, double t) {
  if (!rho.allFinite()) throw DivergenceError("evolve: non-finite state at t = " + std::to_string(t));
  const double lmin = min_eigenvalue(rho);
  if (lmin < -kPositivityFailure) {
    throw IntegratorError("evolve: positivity lost at t = " + std::to_string(t) +
                          " (min eigenvalue " + std::to_string(lmin) +
                          "); tighten the integrator tolerances");
  }
}

}  // namespace detail

/// Integrates d rho/dt for an arbitrary Hamiltonian callable H(t) and records
/// rho at each of `sample_times` (increasing; the first is the start time).
template <class HamiltonianFn>
Trajectory evolve_with(const Matrix3& rho0, HamiltonianFn&& hamiltonian, const DecoherenceRates& rates,
                       std::span<const double> sample_times, const IntegratorConfig& config,
                       Frame frame = Frame::kFull) {
  namespace odeint = boost::numeric::odeint;
  using detail::OdeState;
  config.validate();
  rates.validate();
  if (sample_times.empty()) throw ArgumentError("evolve: no sample times");
  for (std::size_t k = 1; k < sample_times.size(); ++k) {
    if (!(sample_times[k] > sample_times[k - 1])) {
      throw ArgumentError("evolve: sample times must be strictly increasing");
    }
  }

  const auto system = [&](const OdeState& x, OdeState& dxdt, double t) {
    detail::pack(lindblad_rhs(detail::unpack(x), hamiltonian(t), rates), dxdt);
  };

  Trajectory traj;
  traj.frame = frame;
  traj.times.reserve(sample_times.size());
  traj.states.reserve(sample_times.size());

  OdeState x;
  detail::pack(rho0, x);
  detail::hermitize(x);
  double t = sample_times.front();
  detail::check_sample(detail::unpack(x), t);
  traj.times.push_back(t);
  traj.states.push_back(detail::unpack(x));

  if (config.method == Method::kRk4Fixed) {
    odeint::runge_kutta4<OdeState> stepper;
    for (std::size_t k = 1; k < sample_times.size(); ++k) {
      const double target = sample_times[k];
      const double interval = target - t;
      const auto n = static_cast<long>(std::max(1.0, std::ceil(interval / config.step - 1e-9)));
      const double h = interval / static_cast<double>(n);
      for (long s = 0; s < n; ++s) {
        stepper.do_step(system, x, t, h);
        t = sample_times[k - 1] + static_cast<double>(s + 1) * h;
        detail::hermitize(x);
        if (!detail::finite(x)) throw DivergenceError("evolve: non-finite state at t = " + std::to_string(t));
      }
      t = target;
      const Matrix3 rho = detail::unpack(x);
      detail::check_sample(rho, t);
      traj.times.push_back(t);
      traj.states.push_back(rho);
    }
    return traj;
  }

  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<OdeState>>(config.abs_tol,
                                                                                config.rel_tol);
  OdeState dxdt;
  system(x, dxdt, t);
  double dt = std::min(0.01, sample_times.size() > 1 ? sample_times[1] - t : 0.01);
  constexpr int kMaxRejections = 500;
  for (std::size_t k = 1; k < sample_times.size(); ++k) {
    const double target = sample_times[k];
    while (t < target) {
      const double remaining = target - t;
      const bool clipped = dt >= remaining;
      const double dt_free = dt;
      double step = clipped ? remaining : dt;
      int rejections = 0;
      while (stepper.try_step(system, x, dxdt, t, step) == odeint::fail) {
        if (++rejections > kMaxRejections || !(step > 0.0)) {
          throw IntegratorError("evolve: step size underflow at t = " + std::to_string(t));
        }
      }
      dt = step;
      if (clipped) {
        t = target;
        dt = std::max(dt, dt_free);
      }
      detail::hermitize(x);
      detail::hermitize(dxdt);
      if (!detail::finite(x)) throw DivergenceError("evolve: non-finite state at t = " + std::to_string(t));
    }
    const Matrix3 rho = detail::unpack(x);
    detail::check_sample(rho, t);
    traj.times.push_back(t);
    traj.states.push_back(rho);
  }
  return traj;
}

inline auto hamiltonian_fn(const DriveParams& params, const RampSchedule& schedule, Frame frame) {
  return [params, schedule, frame](double t) -> Matrix3 {
    return frame == Frame::kFull ? full_hamiltonian(params, schedule, t)
                                 : effective_hamiltonian(params, schedule, t);
  };
}

inline Trajectory evolve(const DensityMatrix& rho0, const DriveParams& params,
                         const RampSchedule& schedule, const DecoherenceRates& rates, Frame frame,
                         std::span<const double> sample_times, const IntegratorConfig& config) {
  params.validate();
  schedule.validate();
  return evolve_with(rho0.matrix(), hamiltonian_fn(params, schedule, frame), rates, sample_times,
                     config, frame);
}

/// Uniform grid t0, t0 + dt, ..., ending exactly at t1.
inline std::vector<double> sample_grid(double t0, double t1, double interval) {
  if (!(t1 > t0)) throw ArgumentError("sample_grid: t_span must be increasing");
  if (!(interval > 0.0)) throw ArgumentError("sample_grid: interval must be > 0");
  const auto n = static_cast<long>(std::ceil((t1 - t0) / interval - 1e-9));
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k < n; ++k) times.push_back(t0 + static_cast<double>(k) * interval);
  times.push_back(t1);
  return times;
}

/// Evolves over [t0, t1] with samples every config.sample_interval (T/200 when unset).
inline Trajectory evolve(const DensityMatrix& rho0, const DriveParams& params,
                         const RampSchedule& schedule, const DecoherenceRates& rates, Frame frame,
                         double t0, double t1, const IntegratorConfig& config) {
  double interval = config.sample_interval;
  if (interval == 0.0) interval = params.period() / IntegratorConfig::kDefaultSamplesPerPeriod;
  const std::vector<double> times = sample_grid(t0, t1, interval);
  return evolve(rho0, params, schedule, rates, frame, times, config);
}

}  // namespace ods
