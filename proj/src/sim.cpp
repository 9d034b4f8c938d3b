#include "exoopt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace exoopt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kStabilityFraction = 0.7;  // of the RK4 stability radius ~2.8

struct PoleRates {
  double slow;  // smallest decay rate, 1/s
  double wn;    // undamped natural frequency
  double bound; // Cauchy bound on |pole|, governs the stable step
};

// Decay rates of a*x'' + b*x' + c*x = u.
PoleRates pole_rates(double a, double b, double c) {
  const double wn = std::sqrt(c / a);
  const double disc = b * b - 4.0 * a * c;
  const double bound = (b + std::sqrt(b * b + 4.0 * a * c)) / (2.0 * a);
  if (disc >= 0.0) {
    return {(b - std::sqrt(disc)) / (2.0 * a), wn, bound};
  }
  return {b / (2.0 * a), wn, bound};
}

double effective_damping(const MotorParams& m) {
  return m.damping +
         m.torque_constant * m.backemf_constant / m.resistance;
}

struct LockedPlan {
  double dt;
  double steps;
  double tau_ss;   // saturation-aware steady estimate, for the settle check
  double horizon;
};

LockedPlan plan_locked(const MotorParams& m, const DrivetrainConfig& d,
                       double voltage, const SimOptions& opts,
                       double horizon_scale = 1.0) {
  const double n = d.gear_ratio;
  const double k = d.coupling_stiffness / (n * n);
  const double b_eff = effective_damping(m);
  // The current clamp removes back-EMF damping while it is active, so the
  // settle horizon must honour the slower of the two regimes.
  const double slow = std::min(pole_rates(m.rotor_inertia, m.damping, k).slow,
                               pole_rates(m.rotor_inertia, b_eff, k).slow);
  const PoleRates stiff = pole_rates(m.rotor_inertia, b_eff, k);
  const double dt = std::min(opts.dt, kStabilityFraction / stiff.bound);
  const double i_ss = std::min(m.max_current, std::fabs(voltage) / m.resistance);
  const double tau_ss = n * m.torque_constant * i_ss;
  const double rate_scale = tau_ss * std::max(slow, stiff.wn);
  double horizon = (8.0 + std::log1p(rate_scale / 1e-3)) / slow;
  horizon = std::max(horizon, 0.05) * horizon_scale;
  return {dt, std::ceil(horizon / dt), tau_ss, horizon};
}

struct FreePlan {
  double dt;
  double steps;
  double speed_scale;
};

FreePlan plan_free(const MotorParams& m, double voltage,
                   const SimOptions& opts, double horizon_scale = 1.0) {
  const double b_eff = effective_damping(m);
  const double slow = m.damping / m.rotor_inertia;
  const double dt =
      std::min(opts.dt, kStabilityFraction * m.rotor_inertia / b_eff);
  const double v = std::fabs(voltage);
  const double speed_scale =
      std::max(m.torque_constant * m.max_current / m.damping,
               v * m.torque_constant /
                   (m.resistance * m.damping +
                    m.torque_constant * m.backemf_constant));
  double horizon = (8.0 + std::log1p(speed_scale * slow / 1e-6)) / slow;
  horizon = std::max(horizon, 1e-3) * horizon_scale;
  return {dt, std::ceil(horizon / dt), speed_scale};
}

struct BackdrivePlan {
  double dt;
  std::size_t steps_per_cycle;
  std::size_t discard_cycles;
  std::size_t measured_cycles;
  std::size_t total_steps() const {
    return (discard_cycles + measured_cycles) * steps_per_cycle;
  }
  int level;  // dt halvings below the requested step
};

BackdrivePlan plan_backdrive(const MotorParams& m, const DrivetrainConfig& d,
                             double period, const SimOptions& opts) {
  const double n = d.gear_ratio;
  const double a = n * n * m.rotor_inertia * m.resistance;
  const double b = n * n * (m.resistance * m.damping +
                            m.torque_constant * m.backemf_constant);
  const double c = m.resistance * d.coupling_stiffness;
  const PoleRates rates = pole_rates(a, b, c);
  const std::size_t spc0 =
      static_cast<std::size_t>(std::ceil(period / opts.dt));
  int level = 0;
  while (period / static_cast<double>(spc0 << level) >
         kStabilityFraction / rates.bound) {
    ++level;
  }
  const std::size_t spc = spc0 << level;
  const std::size_t discard = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(6.0 / (rates.slow * period))));
  return {period / static_cast<double>(spc), spc, discard, 2, level};
}

void fill_motor_lane(const MotorParams& m, sim::LockedBatchJob& job) {
  job.inv_inertia.push_back(1.0 / m.rotor_inertia);
  job.damping.push_back(m.damping);
  job.k_t.push_back(m.torque_constant);
  job.k_b.push_back(m.backemf_constant);
  job.inv_resistance.push_back(1.0 / m.resistance);
  job.max_current.push_back(m.max_current);
}

void check_finite_lane(double value, const char* what, std::size_t lane) {
  if (!std::isfinite(value))
    throw DivergenceError(lane, std::string(what) +
                                    " simulation diverged at design lane");
}

double locked_final_rate(const MotorParams& m, const DrivetrainConfig& d,
                         double voltage, double angle, double speed) {
  const MechDeriv deriv = locked_output_derivatives(
      MechState{angle, speed}, m, d, voltage);
  (void)deriv;
  return std::fabs(d.coupling_stiffness * speed / d.gear_ratio);
}

}  // namespace

// ---------------------------------------------------------------------------
// Batched drivers
// ---------------------------------------------------------------------------

std::vector<double> batch_max_torque(const MotorParams& motor,
                                     const DrivetrainConfig& base,
                                     std::span<const double> ratios,
                                     const SimOptions& opts) {
  DrivetrainConfig d = base;
  d.validate();
  std::vector<double> out(ratios.size(), 0.0);
  if (ratios.empty()) return out;

  std::vector<std::size_t> pending(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) pending[i] = i;

  double horizon_scale = 1.0;
  for (int attempt = 0; attempt < 4 && !pending.empty(); ++attempt) {
    sim::LockedBatchJob job;
    for (std::size_t idx : pending) {
      d.gear_ratio = ratios[idx];
      d.validate();
      const LockedPlan plan =
          plan_locked(motor, d, base.supply_voltage, opts, horizon_scale);
      fill_motor_lane(motor, job);
      job.spring.push_back(d.coupling_stiffness /
                           (d.gear_ratio * d.gear_ratio));
      job.tau_gain.push_back(d.coupling_stiffness / d.gear_ratio);
      job.voltage.push_back(base.supply_voltage);
      job.dt.push_back(plan.dt);
      job.steps.push_back(plan.steps);
    }
    run_locked_batch(job, opts.isa);

    std::vector<std::size_t> still;
    for (std::size_t k = 0; k < pending.size(); ++k) {
      const std::size_t idx = pending[k];
      check_finite_lane(job.final_angle[k], "locked-output", idx);
      d.gear_ratio = ratios[idx];
      const double rate = locked_final_rate(motor, d, base.supply_voltage,
                                            job.final_angle[k],
                                            job.final_speed[k]);
      if (rate < 1e-3) {
        out[idx] = job.peak_tau[k];
      } else {
        still.push_back(idx);
      }
    }
    pending.swap(still);
    horizon_scale *= 4.0;
  }
  if (!pending.empty())
    throw std::runtime_error("locked-output simulation failed to settle");
  return out;
}

std::vector<double> batch_max_speed(const MotorParams& motor,
                                    const DrivetrainConfig& base,
                                    std::span<const double> ratios,
                                    const SimOptions& opts) {
  base.validate();
  std::vector<double> out(ratios.size(), 0.0);
  if (ratios.empty()) return out;

  // The free-running motor never sees the gear, so one motor-side
  // simulation serves every ratio.
  double motor_peak = 0.0;
  double horizon_scale = 1.0;
  bool settled = false;
  for (int attempt = 0; attempt < 4 && !settled; ++attempt) {
    const FreePlan plan =
        plan_free(motor, base.supply_voltage, opts, horizon_scale);
    sim::FreeBatchJob job;
    job.inv_inertia.push_back(1.0 / motor.rotor_inertia);
    job.damping.push_back(motor.damping);
    job.k_t.push_back(motor.torque_constant);
    job.k_b.push_back(motor.backemf_constant);
    job.inv_resistance.push_back(1.0 / motor.resistance);
    job.max_current.push_back(motor.max_current);
    job.voltage.push_back(base.supply_voltage);
    job.dt.push_back(plan.dt);
    job.steps.push_back(plan.steps);
    run_free_batch(job, opts.isa);
    check_finite_lane(job.final_speed[0], "free-output", 0);

    const MechDeriv deriv = free_output_derivatives(
        MechState{0.0, job.final_speed[0]}, motor, base, base.supply_voltage);
    if (std::fabs(deriv.d_speed) < 1e-6 * std::max(1.0, plan.speed_scale)) {
      motor_peak = job.peak_speed[0];
      settled = true;
    }
    horizon_scale *= 4.0;
  }
  if (!settled)
    throw std::runtime_error("free-output simulation failed to settle");

  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] >= 1.0))
      throw std::domain_error("gear ratio must be >= 1");
    out[i] = motor_peak / ratios[i];
  }
  return out;
}

BackdriveBatchMetrics batch_backdrive(const MotorParams& motor,
                                      const DrivetrainConfig& base,
                                      const GaitInput& gait,
                                      std::span<const double> ratios,
                                      const SimOptions& opts) {
  base.validate();
  BackdriveBatchMetrics out;
  out.rms.assign(ratios.size(), 0.0);
  out.peak.assign(ratios.size(), 0.0);
  if (ratios.empty()) return out;

  const double period = gait.period();
  DrivetrainConfig d = base;

  // Lanes sharing a kernel call must share dt (they index one input table),
  // so group by the step-halving level of the plan.
  std::vector<BackdrivePlan> plans(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    d.gear_ratio = ratios[i];
    d.validate();
    plans[i] = plan_backdrive(motor, d, period, opts);
  }

  std::vector<char> done(ratios.size(), 0);
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (done[i]) continue;
    sim::BackdriveBatchJob job;
    job.dt = plans[i].dt;
    std::vector<std::size_t> members;
    std::size_t max_steps = 0;
    for (std::size_t j = i; j < ratios.size(); ++j) {
      if (done[j] || plans[j].level != plans[i].level) continue;
      const double n = ratios[j];
      const double inv_j = 1.0 / motor.rotor_inertia;
      job.coef_speed.push_back(-effective_damping(motor) * inv_j);
      job.coef_angle.push_back(-base.coupling_stiffness / (n * n) * inv_j);
      job.coef_input.push_back(base.coupling_stiffness / n * inv_j);
      job.tau_gain.push_back(base.coupling_stiffness / n);
      job.neg_kc.push_back(-base.coupling_stiffness);
      job.steps.push_back(static_cast<double>(plans[j].total_steps()));
      job.window_lo.push_back(static_cast<double>(
          plans[j].discard_cycles * plans[j].steps_per_cycle));
      job.window_hi.push_back(static_cast<double>(plans[j].total_steps()));
      members.push_back(j);
      max_steps = std::max(max_steps, plans[j].total_steps());
      done[j] = 1;
    }
    job.input_half.resize(2 * max_steps + 1);
    for (std::size_t k = 0; k < job.input_half.size(); ++k) {
      job.input_half[k] = gait.angle(static_cast<double>(k) * 0.5 * job.dt);
    }
    run_backdrive_batch(job, opts.isa);
    for (std::size_t k = 0; k < members.size(); ++k) {
      const std::size_t idx = members[k];
      check_finite_lane(job.final_angle[k], "backdrive", idx);
      const double count = static_cast<double>(plans[idx].measured_cycles *
                                               plans[idx].steps_per_cycle);
      out.rms[idx] = std::sqrt(job.sum_sq[k] / count);
      out.peak[idx] = job.peak_tau[k];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Single-design drivers
// ---------------------------------------------------------------------------

double simulate_max_torque(const MotorParams& motor,
                           const DrivetrainConfig& drive,
                           const SimOptions& opts) {
  const double ratio[1] = {drive.gear_ratio};
  return batch_max_torque(motor, drive, ratio, opts)[0];
}

double simulate_max_speed(const MotorParams& motor,
                          const DrivetrainConfig& drive,
                          const SimOptions& opts) {
  const double ratio[1] = {drive.gear_ratio};
  return batch_max_speed(motor, drive, ratio, opts)[0];
}

BackdriveMetrics simulate_backdrive(const MotorParams& motor,
                                    const DrivetrainConfig& drive,
                                    const GaitInput& gait,
                                    const SimOptions& opts) {
  const double ratio[1] = {drive.gear_ratio};
  const BackdriveBatchMetrics m =
      batch_backdrive(motor, drive, gait, ratio, opts);
  return {m.rms[0], m.peak[0]};
}

BackdriveMetrics simulate_backdrive(const MotorParams& motor,
                                    const DrivetrainConfig& drive,
                                    const GaitTrace& gait,
                                    const SimOptions& opts) {
  return simulate_backdrive(motor, drive, GaitInput(gait), opts);
}

// ---------------------------------------------------------------------------
// Trace producers (independent scalar route)
// ---------------------------------------------------------------------------

namespace {

template <class DerivFn, class OutputFn>
SimTrace record_trace(DerivFn&& deriv, OutputFn&& outputs, double duration,
                      double dt, double gear_ratio) {
  const auto states = integrate<2>(deriv, {0.0, 0.0}, duration, dt);
  SimTrace trace;
  trace.dt = dt;
  trace.time.reserve(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double t = static_cast<double>(k) * dt;
    const MechState s{states[k][0], states[k][1]};
    const MechDeriv d = outputs(t, s);
    trace.time.push_back(t);
    trace.motor_angle.push_back(s.angle);
    trace.motor_speed.push_back(s.speed);
    trace.current.push_back(d.current);
    trace.tau_a.push_back(d.tau_a);
    trace.output_speed.push_back(s.speed / gear_ratio);
  }
  return trace;
}

}  // namespace

SimTrace locked_output_trace(const MotorParams& motor,
                             const DrivetrainConfig& drive, double voltage,
                             const SimOptions& opts) {
  drive.validate();
  const LockedPlan plan = plan_locked(motor, drive, voltage, opts);
  auto outputs = [&](double, const MechState& s) {
    return locked_output_derivatives(s, motor, drive, voltage);
  };
  auto deriv = [&](double t, const std::array<double, 2>& x) {
    const MechDeriv d =
        locked_output_derivatives(MechState{x[0], x[1]}, motor, drive, voltage);
    (void)t;
    return std::array<double, 2>{d.d_angle, d.d_speed};
  };
  return record_trace(deriv, outputs, plan.steps * plan.dt, plan.dt,
                      drive.gear_ratio);
}

SimTrace free_output_trace(const MotorParams& motor,
                           const DrivetrainConfig& drive, double voltage,
                           const SimOptions& opts) {
  drive.validate();
  const FreePlan plan = plan_free(motor, voltage, opts);
  auto outputs = [&](double, const MechState& s) {
    return free_output_derivatives(s, motor, drive, voltage);
  };
  auto deriv = [&](double t, const std::array<double, 2>& x) {
    const MechDeriv d =
        free_output_derivatives(MechState{x[0], x[1]}, motor, drive, voltage);
    (void)t;
    return std::array<double, 2>{d.d_angle, d.d_speed};
  };
  return record_trace(deriv, outputs, plan.steps * plan.dt, plan.dt,
                      drive.gear_ratio);
}

SimTrace backdrive_trace(const MotorParams& motor,
                         const DrivetrainConfig& drive, const GaitInput& gait,
                         std::size_t cycles, const SimOptions& opts) {
  drive.validate();
  const BackdrivePlan plan = plan_backdrive(motor, drive, gait.period(), opts);
  auto outputs = [&](double t, const MechState& s) {
    return backdriven_derivatives(s, motor, drive, gait.angle(t),
                                  gait.speed(t));
  };
  auto deriv = [&](double t, const std::array<double, 2>& x) {
    const MechDeriv d = backdriven_derivatives(
        MechState{x[0], x[1]}, motor, drive, gait.angle(t), gait.speed(t));
    return std::array<double, 2>{d.d_angle, d.d_speed};
  };
  const double duration =
      static_cast<double>(cycles) * static_cast<double>(plan.steps_per_cycle) *
      plan.dt;
  return record_trace(deriv, outputs, duration, plan.dt, drive.gear_ratio);
}

// ---------------------------------------------------------------------------
// Frequency-domain helpers
// ---------------------------------------------------------------------------

FrequencyResponse frequency_response(const RationalTF& tf, double f_lo_hz,
                                     double f_hi_hz, std::size_t points) {
  if (!(f_lo_hz > 0.0) || !(f_lo_hz < f_hi_hz))
    throw std::invalid_argument("need 0 < f_lo < f_hi");
  if (points < 2) throw std::invalid_argument("need at least two points");

  FrequencyResponse fr;
  fr.freq_hz.reserve(points);
  const double ratio = f_hi_hz / f_lo_hz;
  double prev_phase = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x =
        static_cast<double>(i) / static_cast<double>(points - 1);
    const double f = f_lo_hz * std::pow(ratio, x);
    const std::complex<double> h = tf.eval({0.0, kTwoPi * f});
    double phase = std::atan2(h.imag(), h.real()) * 180.0 / std::numbers::pi;
    if (i > 0) {
      while (phase - prev_phase > 180.0) phase -= 360.0;
      while (phase - prev_phase < -180.0) phase += 360.0;
    }
    prev_phase = phase;
    fr.freq_hz.push_back(f);
    fr.magnitude_db.push_back(20.0 * std::log10(std::abs(h)));
    fr.phase_deg.push_back(phase);
  }
  return fr;
}

double bandwidth_neg3db(const RationalTF& tf) {
  const double dc = std::fabs(tf.dc_gain());  // throws on pole at origin
  if (dc == 0.0)
    throw std::domain_error("-3 dB bandwidth undefined for zero DC gain");
  const double target = dc / std::sqrt(2.0);

  constexpr double kLo = 1e-3, kHi = 1e4;
  if (tf.magnitude(kLo) < target)
    throw NotFoundError("magnitude already below -3 dB at 1e-3 Hz");

  // Bracket on a log grid, then bisect.
  double lo = kLo, hi = 0.0;
  constexpr int kScan = 281;
  for (int i = 1; i < kScan; ++i) {
    const double f =
        kLo * std::pow(kHi / kLo, static_cast<double>(i) / (kScan - 1));
    if (tf.magnitude(f) < target) {
      hi = f;
      break;
    }
    lo = f;
  }
  if (hi == 0.0)
    throw NotFoundError("no -3 dB crossing in [1e-3, 1e4] Hz");
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (tf.magnitude(mid) < target ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double torque_tracking_gain(const MotorParams& motor,
                            const DrivetrainConfig& drive,
                            const ControlGains& gains, double freq_hz,
                            double amplitude, const SimOptions& opts) {
  if (!(freq_hz > 0.0)) throw std::invalid_argument("frequency must be positive");
  const RationalTF tf = closed_loop_torque_tf(motor, drive, gains);
  const PoleRates rates = pole_rates(tf.den[0], tf.den[1], tf.den[2]);
  double dt = std::min(opts.dt, kStabilityFraction / rates.bound);
  const std::size_t spc =
      static_cast<std::size_t>(std::ceil(1.0 / (freq_hz * dt)));
  dt = 1.0 / (freq_hz * static_cast<double>(spc));
  const std::size_t discard = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(10.0 * freq_hz / rates.slow)));
  const std::size_t cycles = discard + 4;

  auto deriv = [&](double t, const std::array<double, 2>& x) {
    const double ref = amplitude * std::sin(kTwoPi * freq_hz * t);
    const MechDeriv d = torque_tracking_derivatives(MechState{x[0], x[1]},
                                                    motor, drive, gains, ref);
    return std::array<double, 2>{d.d_angle, d.d_speed};
  };
  const auto states = integrate<2>(
      deriv, {0.0, 0.0}, static_cast<double>(cycles * spc) * dt, dt);

  // Single-frequency projection over the measured whole cycles.
  const std::size_t start = discard * spc;
  const std::size_t count = 4 * spc;
  double in_phase = 0.0, quad = 0.0;
  const double tau_gain = drive.coupling_stiffness / drive.gear_ratio;
  for (std::size_t k = start; k < start + count; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double tau = tau_gain * states[k][0];
    in_phase += tau * std::sin(kTwoPi * freq_hz * t);
    quad += tau * std::cos(kTwoPi * freq_hz * t);
  }
  const double measured =
      2.0 * std::sqrt(in_phase * in_phase + quad * quad) /
      static_cast<double>(count);
  return measured / amplitude;
}

}  // namespace exoopt
