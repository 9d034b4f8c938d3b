#pragma once

#include <json.hpp>

#include "exoopt/motor.hpp"
#include "exoopt/optimizer.hpp"
#include "exoopt/plant.hpp"
#include "exoopt/rational_tf.hpp"
#include "exoopt/requirements.hpp"

namespace exoopt {

inline void to_json(nlohmann::json& j, const MotorParams& m) {
  j = nlohmann::json{{"gap_radius", m.gap_radius},
                     {"motor_radius", m.motor_radius},
                     {"mass", m.mass},
                     {"rotor_inertia", m.rotor_inertia},
                     {"damping", m.damping},
                     {"torque_constant", m.torque_constant},
                     {"backemf_constant", m.backemf_constant},
                     {"resistance", m.resistance},
                     {"inductance", m.inductance},
                     {"max_voltage", m.max_voltage},
                     {"max_current", m.max_current},
                     {"max_motor_torque", m.max_motor_torque}};
}

inline void to_json(nlohmann::json& j, const RationalTF& tf) {
  j = nlohmann::json{{"num", tf.num}, {"den", tf.den}};
}

inline void to_json(nlohmann::json& j, const Requirements& r) {
  j = nlohmann::json{{"age", r.age},
                     {"min_torque_nm", r.min_torque},
                     {"min_speed_rad_s", r.min_speed},
                     {"min_bandwidth_hz", r.min_bandwidth_hz},
                     {"max_backdrive_torque_nm", r.max_backdrive_torque}};
}

inline void to_json(nlohmann::json& j, const ConstraintReport& r) {
  j = nlohmann::json{
      {"max_torque_nm", r.max_torque},
      {"max_speed_rad_s", r.max_speed},
      {"bandwidth_hz", r.bandwidth_hz},
      {"backdrive_rms_nm", r.backdrive_rms},
      {"feasible",
       {{"torque", r.torque_ok},
        {"speed", r.speed_ok},
        {"bandwidth", r.bandwidth_ok},
        {"backdrive", r.backdrive_ok},
        {"overall", r.feasible}}},
      {"margins",
       {{"torque_nm", r.torque_margin},
        {"speed_rad_s", r.speed_margin},
        {"bandwidth_hz", r.bandwidth_margin},
        {"backdrive_nm", r.backdrive_margin}}}};
}

inline void to_json(nlohmann::json& j, const TwoStageRatio& r) {
  j = nlohmann::json{
      {"stage1", r.stage1}, {"stage2", r.stage2}, {"total", r.total}};
}

inline void to_json(nlohmann::json& j, const OptimizationResult& r) {
  j = nlohmann::json{{"age", r.age}, {"feasible", r.feasible}};
  if (r.feasible) {
    j["gap_radius_m"] = r.gap_radius;
    j["gear_ratio"] = r.gear_ratio;
    j["actuator_mass_kg"] = r.actuator_mass;
    j["active_constraints"] = r.active_constraints;
    j["report"] = r.report;
    j["two_stage_gearbox"] = nearest_two_stage(r.gear_ratio);
  } else {
    j["message"] = r.message;
  }
}

}  // namespace exoopt
