#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "exoopt/gait.hpp"

namespace exoopt {

// Angle-based assistance law: torque follows the smoothed inter-leg angle
// asymmetry with a gain and a time shift, no gait-phase estimation anywhere.
struct ControllerConfig {
  double alpha = 0.04;          // smoothing factor in (0, 1)
  double sample_period = 0.001; // s
  double gain = 10.0;           // kappa, N*m per unit asymmetry
  double time_shift = 0.25;     // s, quantized to whole samples
  // Optional |torque| cap for safety-analysis runs; the actuator model owns
  // saturation otherwise.
  std::optional<double> torque_cap;

  void validate() const;
  std::size_t shift_samples() const;
};

// y_raw = sin(q_r) - sin(q_l), bounded in [-2, 2].
double raw_asymmetry(double q_r, double q_l);

// One exponential smoothing update: y <- (1 - alpha)*y + alpha*y_raw.
double lowpass_step(double y_prev, double y_raw, double alpha);

// First-order cutoff equivalent of the smoothing recurrence,
// f_c = alpha / ((1 - alpha) * 2*pi * dT).
double cutoff_frequency(double alpha, double sample_period);

// Streaming controller; one instance per wearer, advanced strictly in
// sample order.  The filter starts at rest and the delay line zero-filled.
class AsymmetryController {
 public:
  explicit AsymmetryController(ControllerConfig cfg);

  struct Output {
    double y_raw = 0.0;
    double y = 0.0;
    double tau_r = 0.0;  // N*m
    double tau_l = 0.0;  // always exactly -tau_r
  };

  Output step(double q_r, double q_l);

  double smoothed() const { return y_; }
  const ControllerConfig& config() const { return cfg_; }

 private:
  ControllerConfig cfg_;
  double y_ = 0.0;
  std::vector<double> delay_;
  std::size_t head_ = 0;
};

struct ControllerTrace {
  double dt = 0.0;
  std::vector<double> time;
  std::vector<double> q_r, q_l;
  std::vector<double> y_raw, y;
  std::vector<double> tau_r, tau_l;
};

// Streams a two-leg trace (columns q_r_rad, q_l_rad) through the controller.
// The trace is resampled to the controller sample period when it differs.
ControllerTrace run_controller(const GaitTrace& trace,
                               const ControllerConfig& cfg);

}  // namespace exoopt
