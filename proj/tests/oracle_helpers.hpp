#pragma once

// Closed-form oracles shared by the unit and acceptance tests.  Everything
// here is derived independently from the model definitions (steady-state
// algebra, complex evaluation of factored transfer functions, second-order
// frequency identities) and never calls the simulation path it checks.

#include <cmath>
#include <complex>
#include <numbers>

#include "exoopt/motor.hpp"

namespace oracle {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Saturated steady coupling torque with the output locked at full supply:
// the demanded current exceeds the clamp at stall for every radius in the
// family (V/R / I_max is radius-free), so tau_ss = n*kt*Imax.
inline double locked_tau_ss(const exoopt::MotorParams& m, double n) {
  return n * m.torque_constant * m.max_current;
}

// Overshoot of an underdamped second-order step from rest; 1.0 when
// overdamped.  Locked output under saturation has damping b_m and stiffness
// kc/n^2.
inline double locked_overshoot(const exoopt::MotorParams& m, double n,
                               double kc) {
  const double k = kc / (n * n);
  const double zeta =
      m.damping / (2.0 * std::sqrt(m.rotor_inertia * k));
  if (zeta >= 1.0) return 1.0;
  return 1.0 + std::exp(-std::numbers::pi * zeta / std::sqrt(1.0 - zeta * zeta));
}

// Steady motor speed with a free output: the current clamp equilibrium
// kt*Imax/bm applies while the demanded current still exceeds the clamp
// there; otherwise the unsaturated balance V*kt/(R*bm + kt*kb).
inline double free_speed_ss(const exoopt::MotorParams& m, double voltage) {
  const double w_clamped = m.torque_constant * m.max_current / m.damping;
  const double w_unclamp =
      (voltage - m.resistance * m.max_current) / m.backemf_constant;
  if (w_clamped <= w_unclamp) return w_clamped;
  return voltage * m.torque_constant /
         (m.resistance * m.damping +
          m.torque_constant * m.backemf_constant);
}

// |tau_a/theta_h| of the unpowered drive at one frequency, evaluated on the
// factored form rather than expanded polynomial coefficients.
inline double backdrive_gain(const exoopt::MotorParams& m, double n,
                             double kc, double freq_hz) {
  const std::complex<double> s{0.0, kTwoPi * freq_hz};
  const double jr = m.rotor_inertia * m.resistance;
  const double c =
      m.resistance * m.damping + m.backemf_constant * m.torque_constant;
  const std::complex<double> core = n * n * s * (jr * s + c);
  return std::abs(-kc * core / (core + m.resistance * kc));
}

// -3 dB frequency of K/(a s^2 + b s + c), from the quadratic in omega^2:
//   (c - a u)^2 + b^2 u = 2 c^2,  u = omega^2.
inline double neg3db_second_order(double a, double b, double c) {
  const double p = b * b - 2.0 * a * c;
  const double disc = p * p + 4.0 * a * a * c * c;
  const double u = (-p + std::sqrt(disc)) / (2.0 * a * a);
  return std::sqrt(u) / kTwoPi;
}

// Magnitude of the closed torque loop at one frequency from its
// coefficients (independent complex evaluation).
inline double second_order_gain(double K, double a, double b, double c,
                                double freq_hz) {
  const double w = kTwoPi * freq_hz;
  const std::complex<double> den{c - a * w * w, b * w};
  return K / std::abs(den);
}

}  // namespace oracle
