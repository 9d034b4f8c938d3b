#pragma once

#include "exoopt/motor.hpp"
#include "exoopt/rational_tf.hpp"

namespace exoopt {

// Drivetrain and human-interface parameters around the motor.
struct DrivetrainConfig {
  double gear_ratio = 36.0;           // n, >= 1
  double coupling_stiffness = 100.0;  // k_c, N*m/rad (strap/structure)
  double coupling_damping = 0.0;      // b_c, N*m*s/rad; models require 0
  double supply_voltage = 42.0;       // V
  double human_inertia = 0.0;         // J_h, kg*m^2; carried, never integrated

  void validate() const;  // throws std::domain_error on bad values
};

// Torque-loop gains.  The analytic models support proportional control only;
// a nonzero integral gain is rejected rather than approximated.
struct ControlGains {
  double kp = 1.0;
  double ki = 0.0;  // 1/s

  void validate() const;
};

// Signal set of the drive at one instant.  The gear is ideal, so the output
// side is fully determined by the motor side: theta_2 = theta_m / n and
// tau_2 = n * tau_1 at all times.
struct PlantState {
  double motor_angle;        // theta_m, rad
  double motor_speed;        // rad/s
  double current;            // A
  double gear_output_angle;  // theta_2 = theta_m / n
  double gear_input_torque;  // tau_1, N*m
  double gear_output_torque; // tau_2 = n * tau_1
  double output_torque;      // tau_a at the coupling, N*m
  double human_angle;        // theta_h, exogenous
  double human_torque;       // tau_h, exogenous; unused by these scenarios
};

// Closed-loop torque-control transfer function tau_a(s)/tau_r(s) with the
// winding inductance neglected and the human side held still:
//
//              kp*kc*kt*n
//   ---------------------------------------------
//   n^2*R*Jm s^2 + n^2*(R*bm + kb*kt) s + kc*(R + kp*kt*n)
//
// Numerator is zero-padded to denominator length.
RationalTF closed_loop_torque_tf(const MotorParams& motor,
                                 const DrivetrainConfig& drive,
                                 const ControlGains& gains);

// Undamped natural frequency of the closed torque loop, rad/s:
//   sqrt(kc*(R + kp*kt*n) / (n^2*R*Jm))
double natural_frequency(const MotorParams& motor,
                         const DrivetrainConfig& drive,
                         const ControlGains& gains);

// Unpowered (V = 0) transmission from human knee angle to coupling torque,
// tau_a(s)/theta_h(s):
//
//   -kc*n^2*s*(Jm*R s + (R*bm + kb*kt))
//   -----------------------------------
//   n^2*s*(Jm*R s + (R*bm + kb*kt)) + R*kc
RationalTF backdrive_tf(const MotorParams& motor,
                        const DrivetrainConfig& drive);

// Mechanical state of the time-domain scenarios.  With L = 0 the current is
// algebraic and the electrical state disappears.
struct MechState {
  double angle = 0.0;  // motor-side rad
  double speed = 0.0;  // motor-side rad/s
};

struct MechDeriv {
  double d_angle;
  double d_speed;
  double current;  // A, after saturation where it applies
  double tau_a;    // coupling torque, N*m
};

// Output locked at zero: coupling fully wound up by the motor.  Current is
// saturated at +-I_max.
MechDeriv locked_output_derivatives(const MechState& state,
                                    const MotorParams& motor,
                                    const DrivetrainConfig& drive,
                                    double commanded_voltage);

// Free output: no coupling load, motor spins against its own damping.
// Current saturated at +-I_max.
MechDeriv free_output_derivatives(const MechState& state,
                                  const MotorParams& motor,
                                  const DrivetrainConfig& drive,
                                  double commanded_voltage);

// Back-driven: supply shorted (V = 0), human motion winds the coupling.
// human_speed is accepted for interface symmetry; with zero coupling damping
// it does not enter the dynamics.
MechDeriv backdriven_derivatives(const MechState& state,
                                 const MotorParams& motor,
                                 const DrivetrainConfig& drive,
                                 double human_angle, double human_speed);

// Proportional torque loop around the locked-output plant (the time-domain
// counterpart of closed_loop_torque_tf).  Voltage and current are saturated.
MechDeriv torque_tracking_derivatives(const MechState& state,
                                      const MotorParams& motor,
                                      const DrivetrainConfig& drive,
                                      const ControlGains& gains,
                                      double torque_reference);

// Expands a motor-side sample into the full signal set (ideal-gear
// identities applied).
PlantState make_plant_state(const MechState& state, double current,
                            const DrivetrainConfig& drive, double human_angle,
                            double human_torque = 0.0);

}  // namespace exoopt
