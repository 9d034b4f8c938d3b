#pragma once

namespace exoopt {

// Electromechanical parameter set of one motor size.  SI units throughout.
struct MotorParams {
  double gap_radius;        // air-gap radius, m
  double motor_radius;      // outer radius, m
  double mass;              // kg
  double rotor_inertia;     // kg*m^2
  double damping;           // viscous rotor damping, N*m*s/rad
  double torque_constant;   // N*m/A
  double backemf_constant;  // V*s/rad
  double resistance;        // terminal resistance, ohm
  double inductance;        // terminal inductance, H
  double max_voltage;       // V
  double max_current;       // A
  double max_motor_torque;  // N*m
};

// Prototype motor anchoring the scaling family.
const MotorParams& reference_motor();

// Valid gap-radius range of the fixed-radial-thickness scaling family.
// Outside this range the constant-thickness assumption breaks down.
inline constexpr double kMinGapRadius = 0.005;  // m
inline constexpr double kMaxGapRadius = 0.08;   // m

// Scales the reference motor to the given gap radius.  Exponent laws for a
// motor family with fixed rotor/stator radial thickness: radius and the
// electromagnetic constants k_t, k_b, I_max scale linearly, mass and peak
// torque with the square, rotor inertia with the cube, resistance and
// inductance inversely.  Rotor damping and supply voltage have no scaling
// relationship and stay at reference values.
//
// Throws std::domain_error when gap_radius is outside the valid range.
MotorParams scale_motor(double gap_radius);

// Motor mass alone (square law), same domain checks as scale_motor.
double motor_mass(double gap_radius);

}  // namespace exoopt
