#include "exoopt/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace exoopt {

void DrivetrainConfig::validate() const {
  if (!(gear_ratio >= 1.0))
    throw std::domain_error("gear ratio must be >= 1, got " +
                            std::to_string(gear_ratio));
  if (!(coupling_stiffness > 0.0))
    throw std::domain_error("coupling stiffness must be positive");
  if (!(coupling_damping >= 0.0))
    throw std::domain_error("coupling damping must be non-negative");
  if (!(supply_voltage > 0.0))
    throw std::domain_error("supply voltage must be positive");
}

void ControlGains::validate() const {
  if (!(kp > 0.0)) throw std::domain_error("proportional gain must be positive");
  if (!(ki >= 0.0)) throw std::domain_error("integral gain must be non-negative");
}

namespace {

void require_supported(const DrivetrainConfig& drive) {
  drive.validate();
  if (drive.coupling_damping != 0.0) {
    throw std::invalid_argument(
        "analytic plant models require zero coupling damping");
  }
}

void require_p_only(const ControlGains& gains) {
  gains.validate();
  if (gains.ki != 0.0) {
    throw std::invalid_argument(
        "torque-control model supports proportional gains only (ki must be 0)");
  }
}

double saturated_current(double voltage, double backemf_speed,
                         const MotorParams& m) {
  const double demanded = (voltage - m.backemf_constant * backemf_speed) /
                          m.resistance;
  return std::clamp(demanded, -m.max_current, m.max_current);
}

}  // namespace

RationalTF closed_loop_torque_tf(const MotorParams& m,
                                 const DrivetrainConfig& d,
                                 const ControlGains& g) {
  require_supported(d);
  require_p_only(g);
  const double n = d.gear_ratio;
  const double n2 = n * n;
  const double kc = d.coupling_stiffness;
  std::vector<double> num{0.0, 0.0, g.kp * kc * m.torque_constant * n};
  std::vector<double> den{
      n2 * m.resistance * m.rotor_inertia,
      n2 * (m.resistance * m.damping +
            m.backemf_constant * m.torque_constant),
      kc * (m.resistance + g.kp * m.torque_constant * n)};
  return RationalTF(std::move(num), std::move(den));
}

double natural_frequency(const MotorParams& m, const DrivetrainConfig& d,
                         const ControlGains& g) {
  require_supported(d);
  require_p_only(g);
  const double n = d.gear_ratio;
  const double kc = d.coupling_stiffness;
  return std::sqrt(kc * (m.resistance + g.kp * m.torque_constant * n) /
                   (n * n * m.resistance * m.rotor_inertia));
}

RationalTF backdrive_tf(const MotorParams& m, const DrivetrainConfig& d) {
  require_supported(d);
  const double n2 = d.gear_ratio * d.gear_ratio;
  const double kc = d.coupling_stiffness;
  const double jr = m.rotor_inertia * m.resistance;
  const double visc = m.resistance * m.damping +
                      m.backemf_constant * m.torque_constant;
  std::vector<double> num{-kc * n2 * jr, -kc * n2 * visc, 0.0};
  std::vector<double> den{n2 * jr, n2 * visc, m.resistance * kc};
  return RationalTF(std::move(num), std::move(den));
}

MechDeriv locked_output_derivatives(const MechState& s, const MotorParams& m,
                                    const DrivetrainConfig& d,
                                    double commanded_voltage) {
  const double n = d.gear_ratio;
  const double current = saturated_current(commanded_voltage, s.speed, m);
  const double coupling = d.coupling_stiffness * s.angle / (n * n);
  const double accel = (m.torque_constant * current - m.damping * s.speed -
                        coupling) /
                       m.rotor_inertia;
  return MechDeriv{s.speed, accel, current,
                   d.coupling_stiffness * s.angle / n};
}

MechDeriv free_output_derivatives(const MechState& s, const MotorParams& m,
                                  const DrivetrainConfig& d,
                                  double commanded_voltage) {
  (void)d;
  const double current = saturated_current(commanded_voltage, s.speed, m);
  const double accel =
      (m.torque_constant * current - m.damping * s.speed) / m.rotor_inertia;
  return MechDeriv{s.speed, accel, current, 0.0};
}

MechDeriv backdriven_derivatives(const MechState& s, const MotorParams& m,
                                 const DrivetrainConfig& d,
                                 double human_angle, double human_speed) {
  (void)human_speed;  // no coupling damper
  const double n = d.gear_ratio;
  const double current = -m.backemf_constant * s.speed / m.resistance;
  const double tau_a = d.coupling_stiffness * (s.angle / n - human_angle);
  const double tau_1 = tau_a / n;
  const double accel = (m.torque_constant * current - m.damping * s.speed -
                        tau_1) /
                       m.rotor_inertia;
  return MechDeriv{s.speed, accel, current, tau_a};
}

MechDeriv torque_tracking_derivatives(const MechState& s, const MotorParams& m,
                                      const DrivetrainConfig& d,
                                      const ControlGains& g,
                                      double torque_reference) {
  require_p_only(g);
  const double n = d.gear_ratio;
  const double tau_a = d.coupling_stiffness * s.angle / n;
  const double voltage = std::clamp(g.kp * (torque_reference - tau_a),
                                    -m.max_voltage, m.max_voltage);
  const double current = saturated_current(voltage, s.speed, m);
  const double coupling = d.coupling_stiffness * s.angle / (n * n);
  const double accel = (m.torque_constant * current - m.damping * s.speed -
                        coupling) /
                       m.rotor_inertia;
  return MechDeriv{s.speed, accel, current, tau_a};
}

PlantState make_plant_state(const MechState& s, double current,
                            const DrivetrainConfig& d, double human_angle,
                            double human_torque) {
  const double n = d.gear_ratio;
  const double theta_2 = s.angle / n;
  const double tau_a = d.coupling_stiffness * (theta_2 - human_angle);
  const double tau_1 = tau_a / n;
  return PlantState{s.angle,       s.speed, current, theta_2, tau_1,
                    n * tau_1,     tau_a,   human_angle, human_torque};
}

}  // namespace exoopt
