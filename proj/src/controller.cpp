#include "exoopt/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace exoopt {

void ControllerConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("smoothing factor alpha must lie in (0, 1)");
  if (!(sample_period > 0.0))
    throw std::domain_error("sample period must be positive");
  if (!(time_shift >= 0.0))
    throw std::domain_error("time shift must be non-negative");
  if (!std::isfinite(gain))
    throw std::domain_error("gain must be finite");
  if (torque_cap && !(*torque_cap > 0.0))
    throw std::domain_error("torque cap must be positive when set");
}

std::size_t ControllerConfig::shift_samples() const {
  return static_cast<std::size_t>(std::llround(time_shift / sample_period));
}

double raw_asymmetry(double q_r, double q_l) {
  if (!std::isfinite(q_r) || !std::isfinite(q_l))
    throw std::invalid_argument("knee angles must be finite");
  return std::sin(q_r) - std::sin(q_l);
}

double lowpass_step(double y_prev, double y_raw, double alpha) {
  return (1.0 - alpha) * y_prev + alpha * y_raw;
}

double cutoff_frequency(double alpha, double sample_period) {
  return alpha / ((1.0 - alpha) * 2.0 * std::numbers::pi * sample_period);
}

AsymmetryController::AsymmetryController(ControllerConfig cfg)
    : cfg_(std::move(cfg)) {
  cfg_.validate();
  delay_.assign(cfg_.shift_samples(), 0.0);
}

AsymmetryController::Output AsymmetryController::step(double q_r, double q_l) {
  Output out;
  out.y_raw = raw_asymmetry(q_r, q_l);
  y_ = lowpass_step(y_, out.y_raw, cfg_.alpha);
  out.y = y_;

  double delayed = y_;
  if (!delay_.empty()) {
    delayed = delay_[head_];
    delay_[head_] = y_;
    head_ = (head_ + 1) % delay_.size();
  }

  double tau = cfg_.gain * delayed;
  if (cfg_.torque_cap) tau = std::clamp(tau, -*cfg_.torque_cap, *cfg_.torque_cap);
  out.tau_r = tau;
  out.tau_l = -tau;
  return out;
}

ControllerTrace run_controller(const GaitTrace& trace,
                               const ControllerConfig& cfg) {
  cfg.validate();
  const GaitTrace* input = &trace;
  GaitTrace resampled;
  if (std::fabs(trace.dt - cfg.sample_period) > 1e-9) {
    resampled = resample(trace, cfg.sample_period);
    input = &resampled;
  }
  const std::vector<double>* q_r = input->find("q_r_rad");
  const std::vector<double>* q_l = input->find("q_l_rad");
  if (!q_r || !q_l) {
    throw std::invalid_argument(
        "controller input needs q_r_rad and q_l_rad columns");
  }

  AsymmetryController controller(cfg);
  ControllerTrace out;
  out.dt = cfg.sample_period;
  const std::size_t n = q_r->size();
  out.time.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const AsymmetryController::Output o =
        controller.step((*q_r)[k], (*q_l)[k]);
    out.time.push_back(static_cast<double>(k) * cfg.sample_period);
    out.q_r.push_back((*q_r)[k]);
    out.q_l.push_back((*q_l)[k]);
    out.y_raw.push_back(o.y_raw);
    out.y.push_back(o.y);
    out.tau_r.push_back(o.tau_r);
    out.tau_l.push_back(o.tau_l);
  }
  return out;
}

}  // namespace exoopt
