#include "exoopt/run_config.hpp"

#include <stdexcept>

namespace exoopt {

sim::Isa RunConfig::isa() const {
  if (simd == "auto") return sim::Isa::automatic;
  if (simd == "scalar") return sim::Isa::scalar;
  if (simd == "avx2") return sim::Isa::avx2;
  if (simd == "neon") return sim::Isa::neon;
  throw std::invalid_argument("unknown simd setting '" + simd + "'");
}

DrivetrainConfig RunConfig::drivetrain(double gear_ratio) const {
  DrivetrainConfig d;
  d.gear_ratio = gear_ratio;
  d.coupling_stiffness = coupling_stiffness;
  d.coupling_damping = coupling_damping;
  d.supply_voltage = supply_voltage;
  return d;
}

OptimizerConfig RunConfig::optimizer_config() const {
  OptimizerConfig cfg;
  cfg.drivetrain = drivetrain(bounds.min_gear_ratio);
  cfg.gains.kp = kp;
  cfg.sim.dt = dt;
  cfg.sim.isa = isa();
  cfg.bounds = bounds;
  cfg.gait_freq_hz = gait_freq_hz;
  cfg.gait_amplitude = gait_amplitude;
  cfg.jobs = jobs;
  return cfg;
}

void RunConfig::merge_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::invalid_argument("config document must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "coupling_stiffness") coupling_stiffness = value.get<double>();
    else if (key == "coupling_damping") coupling_damping = value.get<double>();
    else if (key == "supply_voltage") supply_voltage = value.get<double>();
    else if (key == "kp") kp = value.get<double>();
    else if (key == "dt") dt = value.get<double>();
    else if (key == "min_gap_radius") bounds.min_gap_radius = value.get<double>();
    else if (key == "max_gap_radius") bounds.max_gap_radius = value.get<double>();
    else if (key == "min_gear_ratio") bounds.min_gear_ratio = value.get<double>();
    else if (key == "max_gear_ratio") bounds.max_gear_ratio = value.get<double>();
    else if (key == "gait_freq_hz") gait_freq_hz = value.get<double>();
    else if (key == "gait_amplitude") gait_amplitude = value.get<double>();
    else if (key == "jobs") jobs = value.get<unsigned>();
    else if (key == "simd") simd = value.get<std::string>();
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

nlohmann::json RunConfig::to_json() const {
  return nlohmann::json{{"coupling_stiffness", coupling_stiffness},
                        {"coupling_damping", coupling_damping},
                        {"supply_voltage", supply_voltage},
                        {"kp", kp},
                        {"dt", dt},
                        {"min_gap_radius", bounds.min_gap_radius},
                        {"max_gap_radius", bounds.max_gap_radius},
                        {"min_gear_ratio", bounds.min_gear_ratio},
                        {"max_gear_ratio", bounds.max_gear_ratio},
                        {"gait_freq_hz", gait_freq_hz},
                        {"gait_amplitude", gait_amplitude},
                        {"jobs", jobs},
                        {"simd", simd}};
}

}  // namespace exoopt
