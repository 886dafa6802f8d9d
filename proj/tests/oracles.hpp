#pragma once

// Reference computations used only by the tests. They follow the textbook
// operator forms directly and share no code path with the library internals
// they check.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "ods/drive.hpp"
#include "ods/lindblad.hpp"
#include "ods/quantum_core.hpp"

namespace ods::oracle {

/// (G/2)[2 L rho L^+ - L^+ L rho - rho L^+ L]
inline Matrix3 dissipator(double rate, const Matrix3& l, const Matrix3& rho) {
  const Matrix3 ld = l.adjoint();
  return 0.5 * rate * (2.0 * l * rho * ld - ld * l * rho - rho * ld * l);
}

/// Master equation assembled term by term from projection operators.
inline Matrix3 lindblad(const Matrix3& rho, const Matrix3& h, const DecoherenceRates& r) {
  const auto s = [](int i, int j) { return projection_operator(i, j); };
  Matrix3 d = Complex(0.0, -1.0) * (h * rho - rho * h);
  d += dissipator(r.gamma31_se, s(1, 3), rho);
  d += dissipator(r.gamma32_se, s(2, 3), rho);
  d += dissipator(r.gamma3_deph, s(3, 3), rho);
  d += dissipator(r.gamma2_deph, s(2, 2), rho);
  d += dissipator(r.gamma21_long, s(1, 2), rho);
  return d;
}

/// Closed forms of the two nonzero lower entries of the four-field Hamiltonian.
inline Complex full_entry31(const DriveParams& p, double eps, double t) {
  const double tc = t + p.clock_offset;
  return Complex(0.0, -1.0) * p.omega12 * eps * std::polar(1.0, -p.phi12) *
         std::polar(1.0, p.big_delta() * tc) * std::sin(p.small_delta() * tc);
}

inline Complex full_entry32(const DriveParams& p, double eps, double t) {
  const double tc = t + p.clock_offset;
  return -p.omega34 * eps * std::polar(1.0, -p.phi34) *
         std::polar(1.0, (p.big_delta() - p.big_delta_prime()) * tc) * std::cos(p.small_delta_34() * tc);
}

/// Central finite difference.
inline double derivative(const std::function<double(double)>& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Random ODS-valid drive: D1 = D + delta, D2 = D - delta, D3 = D + delta, D4 = D - delta.
inline DriveParams random_ods_drive(std::mt19937_64& rng, bool equal_rabi = false) {
  std::uniform_real_distribution<double> omega(0.1, 3.0);
  std::uniform_real_distribution<double> delta(0.01, 0.3);
  std::uniform_real_distribution<double> big(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::bernoulli_distribution flip(0.5);
  DriveParams p;
  p.omega12 = omega(rng);
  p.omega34 = equal_rabi ? p.omega12 : omega(rng);
  const double d = delta(rng) * (flip(rng) ? 1.0 : -1.0);
  const double b = big(rng);
  p.delta1 = b + d;
  p.delta2 = b - d;
  p.delta3 = b + d;
  p.delta4 = b - d;
  p.phi12 = phase(rng);
  p.phi34 = phase(rng);
  return p;
}

inline Vector3 random_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector3 v;
  for (int k = 0; k < 3; ++k) v(k) = Complex(g(rng), g(rng));
  return v;
}

/// Random full-rank density matrix A A^+ / Tr.
inline Matrix3 random_density(std::mt19937_64& rng) {
  Matrix3 a;
  for (int k = 0; k < 3; ++k) a.col(k) = random_vector(rng);
  Matrix3 rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline Matrix3 random_hermitian(std::mt19937_64& rng) {
  Matrix3 a;
  for (int k = 0; k < 3; ++k) a.col(k) = random_vector(rng);
  return 0.5 * (a + a.adjoint());
}

}  // namespace ods::oracle
