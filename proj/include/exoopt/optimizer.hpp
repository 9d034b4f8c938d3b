#pragma once

#include <span>
#include <string>
#include <vector>

#include "exoopt/gait.hpp"
#include "exoopt/motor.hpp"
#include "exoopt/plant.hpp"
#include "exoopt/requirements.hpp"
#include "exoopt/sim.hpp"

namespace exoopt {

// Search box of the design optimization.
struct DesignBounds {
  double min_gap_radius = 0.005;  // m
  double max_gap_radius = 0.05;   // m
  double min_gear_ratio = 1.0;
  double max_gear_ratio = 60.0;

  void validate() const;
};

// The four design metrics of one (gap radius, gear ratio) candidate compared
// against the age-specific thresholds.  Margins are signed slack in the
// constraint's own units, positive when satisfied.
struct ConstraintReport {
  double max_torque = 0.0;      // N*m
  double max_speed = 0.0;       // rad/s, output side
  double bandwidth_hz = 0.0;    // closed-loop natural frequency
  double backdrive_rms = 0.0;   // N*m
  bool torque_ok = false;
  bool speed_ok = false;
  bool bandwidth_ok = false;
  bool backdrive_ok = false;
  bool feasible = false;
  double torque_margin = 0.0;
  double speed_margin = 0.0;
  double bandwidth_margin = 0.0;
  double backdrive_margin = 0.0;
};

// Gear ratios meeting every constraint at a fixed gap radius.
struct GearInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;
};

struct OptimizationResult {
  double age = 0.0;
  bool feasible = false;
  double gap_radius = 0.0;
  double gear_ratio = 0.0;
  double actuator_mass = 0.0;  // kg
  std::vector<std::string> active_constraints;
  ConstraintReport report;
  std::string message;  // set when infeasible: the blocking constraint
};

// Fixed non-motor actuator mass (gearbox and structure): the prototype
// actuator weighs 0.530 kg of which the motor is 0.112 kg.  Gear ratio is
// assumed not to change the gear mass, so the offset never moves the argmin.
inline constexpr double kDriveMassOffset = 0.418;  // kg

double actuator_mass(double gap_radius);

enum class GridMetric {
  max_torque,
  max_speed,
  natural_frequency,
  backdrive_avg,
  mass,
};

GridMetric parse_grid_metric(const std::string& name);
const char* grid_metric_name(GridMetric metric);

// Inclusive linear axis: count >= 2 spans [lo, hi]; count == 1 pins lo.
struct AxisSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

std::vector<double> axis_values(const AxisSpec& axis);

struct GridResult {
  GridMetric metric = GridMetric::mass;
  std::vector<double> gap_radius;  // column axis values
  std::vector<double> gear_ratio;  // row axis values
  std::vector<double> values;      // [i_rg * gear_ratio.size() + i_n]

  double at(std::size_t i_rg, std::size_t i_n) const {
    return values[i_rg * gear_ratio.size() + i_n];
  }
};

struct OptimizerConfig {
  DrivetrainConfig drivetrain;  // gear_ratio field is ignored (searched)
  ControlGains gains;           // kp enters the bandwidth metric
  SimOptions sim;
  DesignBounds bounds;
  double gait_freq_hz = 1.0;
  double gait_amplitude = 1.0;
  double gap_radius_tol = 2e-5;     // bisection width on the radius, m
  double gear_ratio_rel_tol = 1e-3; // relative width of the gear searches
  double active_slack = 0.01;      // active when margin < slack * threshold
  unsigned jobs = 1;
};

// Evaluates designs and searches the (gap radius, gear ratio) box for the
// lightest feasible actuator.  Mass grows monotonically with the radius and
// every metric is monotone in the gear ratio, so the optimum is found by
// bisecting the radius over the emptiness of the feasible gear interval.
class DesignEvaluator {
 public:
  explicit DesignEvaluator(OptimizerConfig cfg);

  const OptimizerConfig& config() const { return cfg_; }
  const GaitInput& gait() const { return gait_; }

  double metric_max_torque(double gap_radius, double gear_ratio) const;
  double metric_max_speed(double gap_radius, double gear_ratio) const;
  double metric_bandwidth_hz(double gap_radius, double gear_ratio) const;
  double metric_backdrive(double gap_radius, double gear_ratio) const;

  ConstraintReport evaluate(double gap_radius, double gear_ratio,
                            const Requirements& req) const;

  GearInterval feasible_gear_interval(double gap_radius,
                                      const Requirements& req) const;

  OptimizationResult optimize(const Requirements& req) const;

  std::vector<OptimizationResult> sweep_ages(
      std::span<const double> ages) const;

  GridResult constraint_grid(GridMetric metric, const AxisSpec& rg_axis,
                             const AxisSpec& n_axis) const;

  // Exhaustive reference search on an inclusive grid over the bounds; used
  // as the testing oracle for optimize().
  OptimizationResult brute_force(const Requirements& req,
                                 std::size_t radius_cells,
                                 std::size_t ratio_cells) const;

 private:
  DrivetrainConfig drive_at(double gear_ratio) const;

  OptimizerConfig cfg_;
  GaitInput gait_;
};

// Closest gearbox realizable as two integer reduction stages (each 1..10);
// reporting helper, does not feed back into the optimization.
struct TwoStageRatio {
  int stage1 = 1;
  int stage2 = 1;
  double total = 1.0;
};

TwoStageRatio nearest_two_stage(double gear_ratio);

}  // namespace exoopt
