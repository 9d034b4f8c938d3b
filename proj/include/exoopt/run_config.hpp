#pragma once

#include <string>

#include <json.hpp>

#include "exoopt/optimizer.hpp"

namespace exoopt {

// Everything a command needs to reproduce a run.  Precedence: built-in
// defaults, then a JSON config document, then command-line flags.  Every
// command echoes the resolved config into its output so reruns are
// bit-identical.
struct RunConfig {
  double coupling_stiffness = 100.0;  // N*m/rad
  double coupling_damping = 0.0;
  double supply_voltage = 42.0;
  double kp = 1.0;
  double dt = 5e-5;
  DesignBounds bounds;
  double gait_freq_hz = 1.0;
  double gait_amplitude = 1.0;
  unsigned jobs = 1;
  std::string simd = "auto";  // auto | scalar | avx2 | neon

  sim::Isa isa() const;
  OptimizerConfig optimizer_config() const;
  DrivetrainConfig drivetrain(double gear_ratio) const;

  void merge_json(const nlohmann::json& j);  // unknown keys rejected
  nlohmann::json to_json() const;
};

}  // namespace exoopt
