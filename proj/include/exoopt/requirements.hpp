#pragma once

#include <optional>

namespace exoopt {

// Supported user age range.  The knee-moment fit is anchored on pediatric
// gait data up to 13 years plus an adult point pinned at 18; extrapolating
// outside is refused rather than guessed.
inline constexpr double kMinAge = 3.0;
inline constexpr double kMaxAge = 18.0;

// Age-specific actuator requirements: three lower bounds and one upper
// bound on the design metrics.
struct Requirements {
  double age = 0.0;                   // years
  double min_torque = 0.0;            // tau_a,req, N*m
  double min_speed = 6.283185307179586;  // omega_req, rad/s (2*pi)
  double min_bandwidth_hz = 20.0;     // natural-frequency requirement
  double max_backdrive_torque = 5.0;  // N*m
};

struct RequirementOverrides {
  std::optional<double> min_torque;
  std::optional<double> min_speed;
  std::optional<double> min_bandwidth_hz;
  std::optional<double> max_backdrive_torque;
};

// Peak biological knee extension moment, quadratic fit over age:
//   M = 0.08277*age^2 + 0.4427*age - 0.4424   [N*m]
// Throws std::domain_error outside [3, 18] years.
double peak_knee_moment(double age);

// Assistance target: 30% of the peak knee moment with a safety factor of 2.
double required_torque(double age);

// Bundles the age-specific torque with the fixed speed/bandwidth/backdrive
// thresholds; overrides replace individual fields.  Non-positive overrides
// are rejected.
Requirements requirements_for_age(double age,
                                  const RequirementOverrides& overrides = {});

}  // namespace exoopt
