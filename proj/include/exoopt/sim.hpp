#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "exoopt/gait.hpp"
#include "exoopt/plant.hpp"
#include "exoopt/rational_tf.hpp"
#include "exoopt/sim_batch.hpp"

namespace exoopt {

// Integration produced a non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// A search that found nothing (e.g. no -3 dB crossing).
class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimOptions {
  // Requested step.  Drivers tighten it per design point so the stiffest
  // mechanical pole stays well inside the integrator stability region.
  double dt = 5e-5;
  // Instruction set for the batched kernels; lane results are identical
  // across ISAs, so this only affects speed.
  sim::Isa isa = sim::Isa::automatic;
};

// Classic fixed-step 4th-order Runge-Kutta.  deriv(t, x) -> dx/dt.
// Returns the state at every sample 0..steps; throws DivergenceError when a
// state stops being finite.
template <std::size_t N, class F>
std::vector<std::array<double, N>> integrate(F&& deriv,
                                             std::array<double, N> x0,
                                             double duration, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const std::size_t steps = static_cast<std::size_t>(
      std::llround(std::max(1.0, duration / dt)));
  std::vector<std::array<double, N>> out;
  out.reserve(steps + 1);
  out.push_back(x0);
  std::array<double, N> x = x0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    std::array<double, N> k1 = deriv(t, x);
    std::array<double, N> xa, xb, xc;
    for (std::size_t j = 0; j < N; ++j) xa[j] = x[j] + 0.5 * dt * k1[j];
    std::array<double, N> k2 = deriv(t + 0.5 * dt, xa);
    for (std::size_t j = 0; j < N; ++j) xb[j] = x[j] + 0.5 * dt * k2[j];
    std::array<double, N> k3 = deriv(t + 0.5 * dt, xb);
    for (std::size_t j = 0; j < N; ++j) xc[j] = x[j] + dt * k3[j];
    std::array<double, N> k4 = deriv(t + dt, xc);
    bool finite = true;
    for (std::size_t j = 0; j < N; ++j) {
      x[j] += dt / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
      finite = finite && std::isfinite(x[j]);
    }
    if (!finite)
      throw DivergenceError(i + 1, "integration diverged to a non-finite state");
    out.push_back(x);
  }
  return out;
}

// Uniformly sampled record of one plant simulation.
struct SimTrace {
  double dt = 0.0;
  std::vector<double> time;          // s
  std::vector<double> motor_angle;   // rad
  std::vector<double> motor_speed;   // rad/s
  std::vector<double> current;       // A
  std::vector<double> tau_a;         // N*m
  std::vector<double> output_speed;  // rad/s, motor speed / n
};

struct FrequencyResponse {
  std::vector<double> freq_hz;
  std::vector<double> magnitude_db;
  std::vector<double> phase_deg;  // unwrapped
};

// Peak coupling torque when the output is locked and the motor is driven at
// full supply voltage from rest until the torque rate settles.
double simulate_max_torque(const MotorParams& motor,
                           const DrivetrainConfig& drive,
                           const SimOptions& opts = {});

// Peak output-side speed with a free output at full supply voltage.
double simulate_max_speed(const MotorParams& motor,
                          const DrivetrainConfig& drive,
                          const SimOptions& opts = {});

struct BackdriveMetrics {
  double rms = 0.0;   // N*m over whole steady cycles
  double peak = 0.0;  // max |tau_a| over the same window
};

// Resistive coupling torque felt by the wearer driving the unpowered
// actuator through the given knee trajectory.  The first cycles are
// discarded until the drive transient is gone (at least one cycle), then two
// whole cycles are measured.
BackdriveMetrics simulate_backdrive(const MotorParams& motor,
                                    const DrivetrainConfig& drive,
                                    const GaitInput& gait,
                                    const SimOptions& opts = {});
BackdriveMetrics simulate_backdrive(const MotorParams& motor,
                                    const DrivetrainConfig& drive,
                                    const GaitTrace& gait,
                                    const SimOptions& opts = {});

// Batched variants over gear ratios that share one motor (one contour-grid
// column).  Entry i corresponds to ratios[i]; results are identical to the
// single-design calls.
std::vector<double> batch_max_torque(const MotorParams& motor,
                                     const DrivetrainConfig& base,
                                     std::span<const double> ratios,
                                     const SimOptions& opts = {});
std::vector<double> batch_max_speed(const MotorParams& motor,
                                    const DrivetrainConfig& base,
                                    std::span<const double> ratios,
                                    const SimOptions& opts = {});
struct BackdriveBatchMetrics {
  std::vector<double> rms;
  std::vector<double> peak;
};
BackdriveBatchMetrics batch_backdrive(const MotorParams& motor,
                                      const DrivetrainConfig& base,
                                      const GaitInput& gait,
                                      std::span<const double> ratios,
                                      const SimOptions& opts = {});

// Full traces of the three scenarios, produced by the generic integrator and
// the scalar derivative functions (an independent route from the batched
// kernels; the tests cross-check the two).
SimTrace locked_output_trace(const MotorParams& motor,
                             const DrivetrainConfig& drive, double voltage,
                             const SimOptions& opts = {});
SimTrace free_output_trace(const MotorParams& motor,
                           const DrivetrainConfig& drive, double voltage,
                           const SimOptions& opts = {});
SimTrace backdrive_trace(const MotorParams& motor,
                         const DrivetrainConfig& drive, const GaitInput& gait,
                         std::size_t cycles, const SimOptions& opts = {});

// |H| and phase at log-spaced frequencies.
FrequencyResponse frequency_response(const RationalTF& tf, double f_lo_hz,
                                     double f_hi_hz, std::size_t points);

// Smallest frequency where |H| falls 3 dB under the DC magnitude, bisected
// to 1e-3 Hz inside [1e-3, 1e4] Hz.  Throws NotFoundError when the response
// never crosses and std::domain_error when the DC gain is zero or infinite.
double bandwidth_neg3db(const RationalTF& tf);

// Steady-state amplitude ratio of the closed torque loop driven by
// tau_r = amplitude*sin(2*pi*f*t), measured by single-frequency projection
// over whole cycles after the transient has decayed.  Time-domain
// counterpart of |closed_loop_torque_tf| for the cross-validation tests.
double torque_tracking_gain(const MotorParams& motor,
                            const DrivetrainConfig& drive,
                            const ControlGains& gains, double freq_hz,
                            double amplitude, const SimOptions& opts = {});

}  // namespace exoopt
