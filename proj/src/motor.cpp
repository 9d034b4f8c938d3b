#include "exoopt/motor.hpp"

#include <stdexcept>
#include <string>

namespace exoopt {

const MotorParams& reference_motor() {
  static const MotorParams ref{
      .gap_radius = 0.021,
      .motor_radius = 0.026,
      .mass = 0.112,
      .rotor_inertia = 9.9e-6,
      .damping = 0.01,
      .torque_constant = 0.04,
      .backemf_constant = 0.04,
      .resistance = 0.74,
      .inductance = 2.98e-4,
      .max_voltage = 42.0,
      .max_current = 16.5,
      .max_motor_torque = 0.66,
  };
  return ref;
}

namespace {

void check_radius(double gap_radius) {
  if (!(gap_radius >= kMinGapRadius)) {
    throw std::domain_error("gap radius " + std::to_string(gap_radius) +
                            " m below lower bound " +
                            std::to_string(kMinGapRadius) + " m");
  }
  if (!(gap_radius <= kMaxGapRadius)) {
    throw std::domain_error("gap radius " + std::to_string(gap_radius) +
                            " m above upper bound " +
                            std::to_string(kMaxGapRadius) + " m");
  }
}

}  // namespace

MotorParams scale_motor(double gap_radius) {
  check_radius(gap_radius);
  const MotorParams& ref = reference_motor();
  const double s = gap_radius / ref.gap_radius;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return MotorParams{
      .gap_radius = gap_radius,
      .motor_radius = ref.motor_radius * s,
      .mass = ref.mass * s2,
      .rotor_inertia = ref.rotor_inertia * s3,
      .damping = ref.damping,
      .torque_constant = ref.torque_constant * s,
      .backemf_constant = ref.backemf_constant * s,
      .resistance = ref.resistance / s,
      .inductance = ref.inductance / s,
      .max_voltage = ref.max_voltage,
      .max_current = ref.max_current * s,
      .max_motor_torque = ref.max_motor_torque * s2,
  };
}

double motor_mass(double gap_radius) {
  check_radius(gap_radius);
  const MotorParams& ref = reference_motor();
  const double s = gap_radius / ref.gap_radius;
  return ref.mass * s * s;
}

}  // namespace exoopt
