#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "exoopt/motor.hpp"

using exoopt::MotorParams;
using exoopt::motor_mass;
using exoopt::reference_motor;
using exoopt::scale_motor;

TEST_CASE("reference scaling is the identity") {
  const MotorParams m = scale_motor(0.021);
  const MotorParams& ref = reference_motor();
  CHECK(m.gap_radius == ref.gap_radius);
  CHECK(m.motor_radius == ref.motor_radius);
  CHECK(m.mass == ref.mass);
  CHECK(m.rotor_inertia == ref.rotor_inertia);
  CHECK(m.damping == ref.damping);
  CHECK(m.torque_constant == ref.torque_constant);
  CHECK(m.backemf_constant == ref.backemf_constant);
  CHECK(m.resistance == ref.resistance);
  CHECK(m.inductance == ref.inductance);
  CHECK(m.max_voltage == ref.max_voltage);
  CHECK(m.max_current == ref.max_current);
  CHECK(m.max_motor_torque == ref.max_motor_torque);
}

TEST_CASE("reference values match the prototype motor") {
  const MotorParams& ref = reference_motor();
  CHECK(ref.gap_radius == 0.021);
  CHECK(ref.motor_radius == 0.026);
  CHECK(ref.mass == 0.112);
  CHECK(ref.rotor_inertia == 9.9e-6);
  CHECK(ref.damping == 0.01);
  CHECK(ref.torque_constant == 0.04);
  CHECK(ref.backemf_constant == 0.04);
  CHECK(ref.resistance == 0.74);
  CHECK(ref.inductance == 2.98e-4);
  CHECK(ref.max_voltage == 42.0);
  CHECK(ref.max_current == 16.5);
  CHECK(ref.max_motor_torque == 0.66);
  // SI consistency of the electromagnetic constants, and peak torque within
  // 1% of k_t * I_max (exact for the prototype).
  CHECK(ref.torque_constant == ref.backemf_constant);
  CHECK(ref.max_motor_torque ==
        doctest::Approx(ref.torque_constant * ref.max_current).epsilon(0.01));
}

TEST_CASE("doubled radius applies the exponent laws") {
  // Hand ratio check: x4 mass, x8 inertia, x2 torque constant, half
  // resistance, x2 current.
  const MotorParams m = scale_motor(0.042);
  CHECK(m.mass == doctest::Approx(0.448).epsilon(1e-12));
  CHECK(m.rotor_inertia == doctest::Approx(7.92e-5).epsilon(1e-12));
  CHECK(m.torque_constant == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(m.resistance == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(m.max_current == doctest::Approx(33.0).epsilon(1e-12));
  CHECK(m.max_motor_torque == doctest::Approx(2.64).epsilon(1e-12));
  CHECK(m.damping == 0.01);
  CHECK(m.max_voltage == 42.0);
}

TEST_CASE("halved radius applies the exponent laws") {
  const MotorParams m = scale_motor(0.0105);
  CHECK(m.torque_constant == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(m.rotor_inertia == doctest::Approx(1.2375e-6).epsilon(1e-12));
}

TEST_CASE("motor mass follows the square law") {
  CHECK(motor_mass(0.021) == 0.112);
  CHECK(motor_mass(0.042) == doctest::Approx(0.448).epsilon(1e-14));
  const double expected = 0.112 * (0.033 / 0.021) * (0.033 / 0.021);
  CHECK(motor_mass(0.033) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(motor_mass(0.033) == doctest::Approx(0.2766).epsilon(1e-3));
}

TEST_CASE("scaling laws compose over the radius") {
  const double radii[] = {0.012, 0.018, 0.021, 0.03, 0.04};
  const double factors[] = {0.5, 0.8, 1.0, 1.5, 2.0};
  for (double r : radii) {
    const MotorParams base = scale_motor(r);
    for (double a : factors) {
      if (r * a < exoopt::kMinGapRadius || r * a > exoopt::kMaxGapRadius)
        continue;
      const MotorParams scaled = scale_motor(a * r);
      CHECK(scaled.motor_radius ==
            doctest::Approx(base.motor_radius * a).epsilon(1e-12));
      CHECK(scaled.mass == doctest::Approx(base.mass * a * a).epsilon(1e-12));
      CHECK(scaled.rotor_inertia ==
            doctest::Approx(base.rotor_inertia * a * a * a).epsilon(1e-12));
      CHECK(scaled.torque_constant ==
            doctest::Approx(base.torque_constant * a).epsilon(1e-12));
      CHECK(scaled.backemf_constant ==
            doctest::Approx(base.backemf_constant * a).epsilon(1e-12));
      CHECK(scaled.resistance ==
            doctest::Approx(base.resistance / a).epsilon(1e-12));
      CHECK(scaled.inductance ==
            doctest::Approx(base.inductance / a).epsilon(1e-12));
      CHECK(scaled.max_current ==
            doctest::Approx(base.max_current * a).epsilon(1e-12));
      CHECK(scaled.max_motor_torque ==
            doctest::Approx(base.max_motor_torque * a * a).epsilon(1e-12));
      CHECK(scaled.damping == base.damping);
      CHECK(scaled.max_voltage == base.max_voltage);
    }
  }
}

TEST_CASE("scale_motor is deterministic") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(exoopt::kMinGapRadius,
                                              exoopt::kMaxGapRadius);
  for (int i = 0; i < 50; ++i) {
    const double r = dist(rng);
    const MotorParams a = scale_motor(r);
    const MotorParams b = scale_motor(r);
    CHECK(a.rotor_inertia == b.rotor_inertia);
    CHECK(a.resistance == b.resistance);
    CHECK(a.max_motor_torque == b.max_motor_torque);
  }
}

TEST_CASE("resistance and torque constant cancel") {
  // R ~ 1/r and k_t ~ r, so the product is radius-free.
  const double expected = 0.74 * 0.04;
  for (double r : {0.006, 0.012, 0.021, 0.035, 0.07}) {
    const MotorParams m = scale_motor(r);
    CHECK(m.resistance * m.torque_constant ==
          doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("out-of-range radii are rejected with the bound named") {
  CHECK_THROWS_WITH_AS(scale_motor(0.004),
                       doctest::Contains("below lower bound"),
                       std::domain_error);
  CHECK_THROWS_WITH_AS(scale_motor(0.09),
                       doctest::Contains("above upper bound"),
                       std::domain_error);
  CHECK_THROWS_AS(motor_mass(0.0), std::domain_error);
  CHECK_THROWS_AS(motor_mass(0.2), std::domain_error);
  CHECK_NOTHROW(scale_motor(0.005));
  CHECK_NOTHROW(scale_motor(0.08));
}
