#include "exoopt/requirements.hpp"

#include <stdexcept>
#include <string>

namespace exoopt {

namespace {

void check_age(double age) {
  if (!(age >= kMinAge && age <= kMaxAge)) {
    throw std::domain_error("age " + std::to_string(age) +
                            " outside supported range [3, 18] years");
  }
}

double apply_override(std::optional<double> value, double fallback,
                      const char* name) {
  if (!value) return fallback;
  if (!(*value > 0.0)) {
    throw std::invalid_argument(std::string("override ") + name +
                                " must be positive");
  }
  return *value;
}

}  // namespace

double peak_knee_moment(double age) {
  check_age(age);
  return 0.08277 * age * age + 0.4427 * age - 0.4424;
}

double required_torque(double age) { return 0.6 * peak_knee_moment(age); }

Requirements requirements_for_age(double age,
                                  const RequirementOverrides& overrides) {
  Requirements req;
  req.age = age;
  req.min_torque =
      apply_override(overrides.min_torque, required_torque(age), "min_torque");
  req.min_speed =
      apply_override(overrides.min_speed, req.min_speed, "min_speed");
  req.min_bandwidth_hz = apply_override(overrides.min_bandwidth_hz,
                                        req.min_bandwidth_hz,
                                        "min_bandwidth_hz");
  req.max_backdrive_torque =
      apply_override(overrides.max_backdrive_torque, req.max_backdrive_torque,
                     "max_backdrive_torque");
  return req;
}

}  // namespace exoopt
