#include "exoopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "exoopt/parallel.hpp"

namespace exoopt {

void DesignBounds::validate() const {
  if (!(min_gap_radius >= kMinGapRadius && max_gap_radius <= kMaxGapRadius &&
        min_gap_radius < max_gap_radius)) {
    throw std::domain_error("gap-radius bounds must be ordered inside the "
                            "motor scaling range");
  }
  if (!(min_gear_ratio >= 1.0 && min_gear_ratio < max_gear_ratio)) {
    throw std::domain_error("gear-ratio bounds must be ordered and >= 1");
  }
}

double actuator_mass(double gap_radius) {
  return motor_mass(gap_radius) + kDriveMassOffset;
}

GridMetric parse_grid_metric(const std::string& name) {
  if (name == "max_torque") return GridMetric::max_torque;
  if (name == "max_speed") return GridMetric::max_speed;
  if (name == "natural_frequency") return GridMetric::natural_frequency;
  if (name == "backdrive_avg") return GridMetric::backdrive_avg;
  if (name == "mass") return GridMetric::mass;
  throw std::invalid_argument("unknown grid metric '" + name + "'");
}

const char* grid_metric_name(GridMetric metric) {
  switch (metric) {
    case GridMetric::max_torque: return "max_torque";
    case GridMetric::max_speed: return "max_speed";
    case GridMetric::natural_frequency: return "natural_frequency";
    case GridMetric::backdrive_avg: return "backdrive_avg";
    case GridMetric::mass: return "mass";
  }
  return "?";
}

std::vector<double> axis_values(const AxisSpec& axis) {
  if (axis.count == 0) throw std::invalid_argument("axis needs >= 1 point");
  if (axis.count == 1) return {axis.lo};
  if (!(axis.lo < axis.hi))
    throw std::invalid_argument("axis bounds must be ordered");
  std::vector<double> v(axis.count);
  for (std::size_t i = 0; i < axis.count; ++i) {
    v[i] = axis.lo + (axis.hi - axis.lo) * static_cast<double>(i) /
                         static_cast<double>(axis.count - 1);
  }
  return v;
}

DesignEvaluator::DesignEvaluator(OptimizerConfig cfg)
    : cfg_(std::move(cfg)),
      gait_(knee_waveform(cfg_.gait_freq_hz, cfg_.gait_amplitude)) {
  cfg_.bounds.validate();
  cfg_.gains.validate();
  DrivetrainConfig probe = cfg_.drivetrain;
  probe.gear_ratio = cfg_.bounds.min_gear_ratio;
  probe.validate();
}

DrivetrainConfig DesignEvaluator::drive_at(double gear_ratio) const {
  DrivetrainConfig d = cfg_.drivetrain;
  d.gear_ratio = gear_ratio;
  return d;
}

double DesignEvaluator::metric_max_torque(double gap_radius,
                                          double gear_ratio) const {
  return simulate_max_torque(scale_motor(gap_radius), drive_at(gear_ratio),
                             cfg_.sim);
}

double DesignEvaluator::metric_max_speed(double gap_radius,
                                         double gear_ratio) const {
  return simulate_max_speed(scale_motor(gap_radius), drive_at(gear_ratio),
                            cfg_.sim);
}

double DesignEvaluator::metric_bandwidth_hz(double gap_radius,
                                            double gear_ratio) const {
  const double two_pi = 6.283185307179586;
  return natural_frequency(scale_motor(gap_radius), drive_at(gear_ratio),
                           cfg_.gains) /
         two_pi;
}

double DesignEvaluator::metric_backdrive(double gap_radius,
                                         double gear_ratio) const {
  return simulate_backdrive(scale_motor(gap_radius), drive_at(gear_ratio),
                            gait_, cfg_.sim)
      .rms;
}

ConstraintReport DesignEvaluator::evaluate(double gap_radius,
                                           double gear_ratio,
                                           const Requirements& req) const {
  const MotorParams motor = scale_motor(gap_radius);
  const DrivetrainConfig drive = drive_at(gear_ratio);
  drive.validate();

  ConstraintReport r;
  r.max_torque = simulate_max_torque(motor, drive, cfg_.sim);
  r.max_speed = simulate_max_speed(motor, drive, cfg_.sim);
  r.bandwidth_hz = metric_bandwidth_hz(gap_radius, gear_ratio);
  r.backdrive_rms = simulate_backdrive(motor, drive, gait_, cfg_.sim).rms;

  r.torque_ok = r.max_torque > req.min_torque;
  r.speed_ok = r.max_speed > req.min_speed;
  r.bandwidth_ok = r.bandwidth_hz > req.min_bandwidth_hz;
  r.backdrive_ok = r.backdrive_rms < req.max_backdrive_torque;
  r.feasible = r.torque_ok && r.speed_ok && r.bandwidth_ok && r.backdrive_ok;

  r.torque_margin = r.max_torque - req.min_torque;
  r.speed_margin = r.max_speed - req.min_speed;
  r.bandwidth_margin = r.bandwidth_hz - req.min_bandwidth_hz;
  r.backdrive_margin = req.max_backdrive_torque - r.backdrive_rms;
  return r;
}

namespace {

// Monotone boundary searches over the gear ratio.  `ok` must be monotone in
// the stated direction; tolerance is relative to the upper end.

// Smallest n in [lo, hi] with ok(n) true, ok nondecreasing in n.
// Returns quiet NaN when even hi fails.
template <class F>
double lowest_passing(F&& ok, double lo, double hi, double rel_tol) {
  if (ok(lo)) return lo;
  if (!ok(hi)) return std::numeric_limits<double>::quiet_NaN();
  while ((hi - lo) > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Largest n in [lo, hi] with ok(n) true, ok nonincreasing in n.
template <class F>
double highest_passing(F&& ok, double lo, double hi, double rel_tol) {
  if (!ok(lo)) return std::numeric_limits<double>::quiet_NaN();
  if (ok(hi)) return hi;
  while ((hi - lo) > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

GearInterval DesignEvaluator::feasible_gear_interval(
    double gap_radius, const Requirements& req) const {
  const MotorParams motor = scale_motor(gap_radius);
  const double n_min = cfg_.bounds.min_gear_ratio;
  const double n_max = cfg_.bounds.max_gear_ratio;
  const double tol = cfg_.gear_ratio_rel_tol;

  // Output torque grows with n.
  auto torque_ok = [&](double n) {
    return simulate_max_torque(motor, drive_at(n), cfg_.sim) > req.min_torque;
  };
  const double n_lo = lowest_passing(torque_ok, n_min, n_max, tol);
  if (std::isnan(n_lo)) return {};

  // Output speed falls as 1/n; one motor-side simulation serves all probes.
  const double motor_peak =
      simulate_max_speed(motor, drive_at(1.0), cfg_.sim);
  auto speed_ok = [&](double n) { return motor_peak / n > req.min_speed; };
  const double n_speed = highest_passing(speed_ok, n_min, n_max, tol);
  if (std::isnan(n_speed)) return {};

  auto bandwidth_ok = [&](double n) {
    return metric_bandwidth_hz(gap_radius, n) > req.min_bandwidth_hz;
  };
  const double n_bandwidth = highest_passing(bandwidth_ok, n_min, n_max, tol);
  if (std::isnan(n_bandwidth)) return {};

  auto backdrive_ok = [&](double n) {
    return simulate_backdrive(motor, drive_at(n), gait_, cfg_.sim).rms <
           req.max_backdrive_torque;
  };
  const double n_backdrive = highest_passing(backdrive_ok, n_min, n_max, tol);
  if (std::isnan(n_backdrive)) return {};

  const double n_hi = std::min({n_speed, n_bandwidth, n_backdrive});
  if (n_lo > n_hi) return {};
  return {n_lo, n_hi, false};
}

OptimizationResult DesignEvaluator::optimize(const Requirements& req) const {
  OptimizationResult result;
  result.age = req.age;

  const double rg_lo_bound = cfg_.bounds.min_gap_radius;
  const double rg_hi_bound = cfg_.bounds.max_gap_radius;

  const GearInterval at_top = feasible_gear_interval(rg_hi_bound, req);
  if (at_top.empty) {
    // Nothing feasible anywhere: name what blocks at the boundary.
    const MotorParams motor = scale_motor(rg_hi_bound);
    auto torque_ok = [&](double n) {
      return simulate_max_torque(motor, drive_at(n), cfg_.sim) >
             req.min_torque;
    };
    result.feasible = false;
    if (!torque_ok(cfg_.bounds.max_gear_ratio)) {
      result.message =
          "infeasible: required torque unattainable at the gap-radius and "
          "gear-ratio upper bounds";
    } else {
      result.message =
          "infeasible: speed/bandwidth/backdrive caps fall below the "
          "torque-required gear ratio at the gap-radius upper bound";
    }
    return result;
  }

  double lo = rg_lo_bound;
  double hi = rg_hi_bound;
  GearInterval hi_interval = at_top;
  const GearInterval at_bottom = feasible_gear_interval(rg_lo_bound, req);
  if (!at_bottom.empty) {
    hi = rg_lo_bound;
    hi_interval = at_bottom;
  } else {
    while (hi - lo > cfg_.gap_radius_tol) {
      const double mid = 0.5 * (lo + hi);
      const GearInterval interval = feasible_gear_interval(mid, req);
      if (interval.empty) {
        lo = mid;
      } else {
        hi = mid;
        hi_interval = interval;
      }
    }
  }

  result.feasible = true;
  result.gap_radius = hi;
  result.gear_ratio = 0.5 * (hi_interval.lo + hi_interval.hi);
  result.actuator_mass = actuator_mass(hi);
  result.report = evaluate(hi, result.gear_ratio, req);

  const ConstraintReport& rep = result.report;
  if (rep.torque_margin < cfg_.active_slack * req.min_torque)
    result.active_constraints.push_back("torque");
  if (rep.speed_margin < cfg_.active_slack * req.min_speed)
    result.active_constraints.push_back("speed");
  if (rep.bandwidth_margin < cfg_.active_slack * req.min_bandwidth_hz)
    result.active_constraints.push_back("bandwidth");
  if (rep.backdrive_margin < cfg_.active_slack * req.max_backdrive_torque)
    result.active_constraints.push_back("backdrive");
  return result;
}

std::vector<OptimizationResult> DesignEvaluator::sweep_ages(
    std::span<const double> ages) const {
  std::vector<OptimizationResult> results(ages.size());
  parallel_for(ages.size(), cfg_.jobs, [&](std::size_t i) {
    results[i] = optimize(requirements_for_age(ages[i]));
  });
  return results;
}

GridResult DesignEvaluator::constraint_grid(GridMetric metric,
                                            const AxisSpec& rg_axis,
                                            const AxisSpec& n_axis) const {
  GridResult grid;
  grid.metric = metric;
  grid.gap_radius = axis_values(rg_axis);
  grid.gear_ratio = axis_values(n_axis);
  grid.values.assign(grid.gap_radius.size() * grid.gear_ratio.size(), 0.0);

  static std::mutex log_mutex;
  const std::vector<double>& ns = grid.gear_ratio;
  parallel_for(grid.gap_radius.size(), cfg_.jobs, [&](std::size_t i) {
    const double rg = grid.gap_radius[i];
    double* row = grid.values.data() + i * ns.size();
    try {
      const MotorParams motor = scale_motor(rg);
      switch (metric) {
        case GridMetric::mass: {
          const double m = actuator_mass(rg);
          for (std::size_t j = 0; j < ns.size(); ++j) row[j] = m;
          break;
        }
        case GridMetric::natural_frequency: {
          for (std::size_t j = 0; j < ns.size(); ++j)
            row[j] = metric_bandwidth_hz(rg, ns[j]);
          break;
        }
        case GridMetric::max_torque: {
          const std::vector<double> v =
              batch_max_torque(motor, cfg_.drivetrain, ns, cfg_.sim);
          std::copy(v.begin(), v.end(), row);
          break;
        }
        case GridMetric::max_speed: {
          const std::vector<double> v =
              batch_max_speed(motor, cfg_.drivetrain, ns, cfg_.sim);
          std::copy(v.begin(), v.end(), row);
          break;
        }
        case GridMetric::backdrive_avg: {
          const BackdriveBatchMetrics v =
              batch_backdrive(motor, cfg_.drivetrain, gait_, ns, cfg_.sim);
          std::copy(v.rms.begin(), v.rms.end(), row);
          break;
        }
      }
    } catch (const DivergenceError& e) {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "grid column r_g=" << rg << " diverged: " << e.what()
                << "\n";
      for (std::size_t j = 0; j < ns.size(); ++j)
        row[j] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  return grid;
}

OptimizationResult DesignEvaluator::brute_force(const Requirements& req,
                                                std::size_t radius_cells,
                                                std::size_t ratio_cells) const {
  const std::vector<double> radii = axis_values(
      {cfg_.bounds.min_gap_radius, cfg_.bounds.max_gap_radius, radius_cells});
  const std::vector<double> ratios = axis_values(
      {cfg_.bounds.min_gear_ratio, cfg_.bounds.max_gear_ratio, ratio_cells});

  OptimizationResult result;
  result.age = req.age;

  for (double rg : radii) {
    const MotorParams motor = scale_motor(rg);

    // Cheap screens first: analytic bandwidth and the shared-motor speed.
    std::vector<double> candidates;
    const double motor_peak =
        simulate_max_speed(motor, drive_at(1.0), cfg_.sim);
    for (double n : ratios) {
      if (!(motor_peak / n > req.min_speed)) continue;
      if (!(metric_bandwidth_hz(rg, n) > req.min_bandwidth_hz)) continue;
      candidates.push_back(n);
    }
    if (candidates.empty()) continue;

    const std::vector<double> torque =
        batch_max_torque(motor, cfg_.drivetrain, candidates, cfg_.sim);
    std::vector<double> survivors;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (torque[k] > req.min_torque) survivors.push_back(candidates[k]);
    }
    if (survivors.empty()) continue;

    const BackdriveBatchMetrics bd =
        batch_backdrive(motor, cfg_.drivetrain, gait_, survivors, cfg_.sim);
    std::vector<double> feasible;
    for (std::size_t k = 0; k < survivors.size(); ++k) {
      if (bd.rms[k] < req.max_backdrive_torque) feasible.push_back(survivors[k]);
    }
    if (feasible.empty()) continue;

    result.feasible = true;
    result.gap_radius = rg;
    result.gear_ratio = 0.5 * (feasible.front() + feasible.back());
    result.actuator_mass = actuator_mass(rg);
    result.report = evaluate(rg, result.gear_ratio, req);
    return result;
  }
  result.message = "infeasible: no grid cell satisfies all constraints";
  return result;
}

TwoStageRatio nearest_two_stage(double gear_ratio) {
  if (!(gear_ratio >= 1.0))
    throw std::domain_error("gear ratio must be >= 1");
  TwoStageRatio best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int a = 1; a <= 10; ++a) {
    for (int b = a; b <= 10; ++b) {
      const double total = static_cast<double>(a) * b;
      const double err = std::fabs(total - gear_ratio);
      if (err < best_err - 1e-12 ||
          (std::fabs(err - best_err) <= 1e-12 && total < best.total)) {
        best = {a, b, total};
        best_err = err;
      }
    }
  }
  return best;
}

}  // namespace exoopt
