#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "exoopt/motor.hpp"
#include "exoopt/plant.hpp"

using namespace exoopt;

namespace {

DrivetrainConfig reference_drive(double n = 36.0, double kc = 100.0) {
  DrivetrainConfig d;
  d.gear_ratio = n;
  d.coupling_stiffness = kc;
  return d;
}

// Independent route for the unpowered transmission: evaluate the factored
// form -kc*n^2*s*(J*R*s + c) / (n^2*s*(J*R*s + c) + R*kc) directly.
std::complex<double> backdrive_factored(const MotorParams& m, double n,
                                        double kc, std::complex<double> s) {
  const double jr = m.rotor_inertia * m.resistance;
  const double c =
      m.resistance * m.damping + m.backemf_constant * m.torque_constant;
  const std::complex<double> core = n * n * s * (jr * s + c);
  return -kc * core / (core + m.resistance * kc);
}

}  // namespace

TEST_CASE("closed-loop transfer function coefficients (reference design)") {
  const RationalTF tf =
      closed_loop_torque_tf(reference_motor(), reference_drive(), {});
  REQUIRE(tf.num.size() == 3);
  REQUIRE(tf.den.size() == 3);
  CHECK(tf.num[0] == 0.0);
  CHECK(tf.num[1] == 0.0);
  CHECK(tf.num[2] == doctest::Approx(144.0).epsilon(1e-12));
  CHECK(tf.den[0] == doctest::Approx(9.4945e-3).epsilon(1e-4));
  CHECK(tf.den[1] == doctest::Approx(11.664).epsilon(1e-12));
  CHECK(tf.den[2] == doctest::Approx(218.0).epsilon(1e-12));
  CHECK(tf.dc_gain() == doctest::Approx(144.0 / 218.0).epsilon(1e-12));
}

TEST_CASE("closed-loop coefficients match the symbolic form for random draws") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> radius(0.006, 0.07);
  std::uniform_real_distribution<double> ratio(1.0, 60.0);
  std::uniform_real_distribution<double> stiffness(20.0, 500.0);
  std::uniform_real_distribution<double> gain(0.2, 8.0);
  for (int i = 0; i < 10; ++i) {
    const MotorParams m = scale_motor(radius(rng));
    const double n = ratio(rng);
    const double kc = stiffness(rng);
    const double kp = gain(rng);
    const RationalTF tf = closed_loop_torque_tf(m, reference_drive(n, kc),
                                                ControlGains{kp, 0.0});
    // Term-by-term re-derivation.
    CHECK(tf.num[2] ==
          doctest::Approx(kp * kc * m.torque_constant * n).epsilon(1e-12));
    CHECK(tf.den[0] == doctest::Approx(n * n * m.resistance *
                                       m.rotor_inertia).epsilon(1e-12));
    CHECK(tf.den[1] ==
          doctest::Approx(n * n * (m.resistance * m.damping +
                                   m.backemf_constant * m.torque_constant))
              .epsilon(1e-12));
    CHECK(tf.den[2] ==
          doctest::Approx(kc * (m.resistance + kp * m.torque_constant * n))
              .epsilon(1e-12));
  }
}

TEST_CASE("DC gain approaches one as kp grows") {
  double prev = 0.0;
  for (double kp : {0.5, 1.0, 4.0, 16.0, 64.0, 256.0}) {
    const double dc = closed_loop_torque_tf(reference_motor(),
                                            reference_drive(),
                                            ControlGains{kp, 0.0})
                          .dc_gain();
    CHECK(dc > prev);
    CHECK(dc < 1.0);
    prev = dc;
  }
  CHECK(prev > 0.99);
}

TEST_CASE("nonzero integral gain is rejected") {
  CHECK_THROWS_AS(closed_loop_torque_tf(reference_motor(), reference_drive(),
                                        ControlGains{1.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(natural_frequency(reference_motor(), reference_drive(),
                                    ControlGains{1.0, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("nonzero coupling damping is rejected by the analytic models") {
  DrivetrainConfig d = reference_drive();
  d.coupling_damping = 0.5;
  CHECK_THROWS_AS(closed_loop_torque_tf(reference_motor(), d, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(backdrive_tf(reference_motor(), d), std::invalid_argument);
}

TEST_CASE("natural frequency of the reference design") {
  const double wn = natural_frequency(reference_motor(), reference_drive(), {});
  CHECK(wn == doctest::Approx(std::sqrt(218.0 / 9.4945e-3)).epsilon(1e-4));
  CHECK(wn / (2.0 * std::numbers::pi) == doctest::Approx(24.1).epsilon(2e-3));
}

TEST_CASE("natural frequency equals the undamped frequency of the TF") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> radius(0.006, 0.07);
  std::uniform_real_distribution<double> ratio(1.0, 60.0);
  for (int i = 0; i < 20; ++i) {
    const MotorParams m = scale_motor(radius(rng));
    const DrivetrainConfig d = reference_drive(ratio(rng));
    const RationalTF tf = closed_loop_torque_tf(m, d, {});
    const double wn = natural_frequency(m, d, {});
    CHECK(wn == doctest::Approx(std::sqrt(tf.den[2] / tf.den[0]))
                    .epsilon(1e-12));
    // wn^2 * n^2*R*Jm == kc*(R + kp*kt*n)
    CHECK(wn * wn * tf.den[0] == doctest::Approx(tf.den[2]).epsilon(1e-12));
  }
}

TEST_CASE("quadrupling the coupling stiffness doubles the natural frequency") {
  const double w1 = natural_frequency(reference_motor(),
                                      reference_drive(36.0, 100.0), {});
  const double w2 = natural_frequency(reference_motor(),
                                      reference_drive(36.0, 400.0), {});
  CHECK(w2 == doctest::Approx(2.0 * w1).epsilon(1e-14));
}

TEST_CASE("natural frequency falls as the gear ratio grows") {
  double prev = std::numeric_limits<double>::infinity();
  for (double n : {5.0, 10.0, 20.0, 40.0}) {
    const double wn =
        natural_frequency(reference_motor(), reference_drive(n), {});
    CHECK(wn < prev);
    prev = wn;
  }
}

TEST_CASE("backdrive transfer function coefficients (reference design)") {
  const RationalTF tf = backdrive_tf(reference_motor(), reference_drive());
  REQUIRE(tf.num.size() == 3);
  REQUIRE(tf.den.size() == 3);
  CHECK(tf.num[0] == doctest::Approx(-0.9494496).epsilon(1e-12));
  CHECK(tf.num[1] == doctest::Approx(-1166.4).epsilon(1e-12));
  CHECK(tf.num[2] == 0.0);
  CHECK(tf.den[0] == doctest::Approx(9.494496e-3).epsilon(1e-12));
  CHECK(tf.den[1] == doctest::Approx(11.664).epsilon(1e-12));
  CHECK(tf.den[2] == doctest::Approx(74.0).epsilon(1e-12));
}

TEST_CASE("backdrive magnitude vanishes at low frequency") {
  const RationalTF tf = backdrive_tf(reference_motor(), reference_drive());
  double prev = tf.magnitude(1e-1);
  for (double f : {1e-2, 1e-3, 1e-4}) {
    const double mag = tf.magnitude(f);
    CHECK(mag < prev);
    prev = mag;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("backdrive polynomial matches the factored form at one frequency") {
  const RationalTF tf = backdrive_tf(reference_motor(), reference_drive());
  const std::complex<double> s{0.0, 2.0 * std::numbers::pi};
  const std::complex<double> expected =
      backdrive_factored(reference_motor(), 36.0, 100.0, s);
  const std::complex<double> actual = tf.eval(s);
  CHECK(std::abs(actual - expected) <= 1e-9 * std::abs(expected));
  // Independent hand evaluation of the same point.
  CHECK(std::abs(actual) == doctest::Approx(70.55).epsilon(2e-3));
}

TEST_CASE("low gear ratio backdrives far easier than the prototype ratio") {
  const double f = 0.5;  // Hz, low-frequency regime
  const double small =
      backdrive_tf(reference_motor(), reference_drive(1.0)).magnitude(f);
  const double large =
      backdrive_tf(reference_motor(), reference_drive(36.0)).magnitude(f);
  CHECK(small * 20.0 < large);
}

TEST_CASE("locked output: saturated steady state") {
  // At full voltage the clamp pins the current, so d(omega)/dt = 0 and
  // d(theta)/dt = 0 at theta_ss = n^2*kt*Imax/kc.
  const MotorParams& m = reference_motor();
  const DrivetrainConfig d = reference_drive();
  const double theta_ss = 36.0 * 36.0 * m.torque_constant * m.max_current /
                          d.coupling_stiffness;
  const MechDeriv deriv =
      locked_output_derivatives({theta_ss, 0.0}, m, d, 42.0);
  CHECK(deriv.current == m.max_current);
  CHECK(deriv.d_speed == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(deriv.tau_a == doctest::Approx(23.76).epsilon(1e-12));
}

TEST_CASE("locked output: unsaturated steady state at low voltage") {
  // tau_ss = n*kt*V/R when the demanded current stays below the clamp.
  const MotorParams& m = reference_motor();
  const DrivetrainConfig d = reference_drive();
  const double voltage = 1.0;
  const double theta_ss = 36.0 * 36.0 * m.torque_constant * voltage /
                          (m.resistance * d.coupling_stiffness);
  const MechDeriv deriv =
      locked_output_derivatives({theta_ss, 0.0}, m, d, voltage);
  CHECK(deriv.current == doctest::Approx(voltage / m.resistance).epsilon(1e-12));
  CHECK(deriv.d_speed == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(deriv.tau_a ==
        doctest::Approx(36.0 * m.torque_constant * voltage / m.resistance)
            .epsilon(1e-12));
}

TEST_CASE("locked output: zero voltage from rest stays at rest") {
  const MechDeriv deriv = locked_output_derivatives(
      {0.0, 0.0}, reference_motor(), reference_drive(), 0.0);
  CHECK(deriv.d_angle == 0.0);
  CHECK(deriv.d_speed == 0.0);
  CHECK(deriv.tau_a == 0.0);
}

TEST_CASE("free output: clamped and unclamped equilibria") {
  const MotorParams& m = reference_motor();
  const DrivetrainConfig d = reference_drive();

  // Full supply: the demanded current exceeds the clamp all the way to the
  // equilibrium omega = kt*Imax/bm.
  const double w_clamped = m.torque_constant * m.max_current / m.damping;
  const MechDeriv at42 = free_output_derivatives({0.0, w_clamped}, m, d, 42.0);
  CHECK(at42.current == m.max_current);
  CHECK(at42.d_speed == doctest::Approx(0.0).epsilon(1e-9));

  // Low supply: classic unsaturated balance omega = V*kt/(R*bm + kt*kb).
  const double voltage = 7.0;
  const double w_free = voltage * m.torque_constant /
                        (m.resistance * m.damping +
                         m.torque_constant * m.backemf_constant);
  const MechDeriv at7 = free_output_derivatives({0.0, w_free}, m, d, voltage);
  CHECK(at7.current < m.max_current);
  CHECK(at7.d_speed == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("backdriven derivatives reproduce the transfer-function dynamics") {
  // theta_h = 0 and rest state: everything zero.
  const MechDeriv rest = backdriven_derivatives(
      {0.0, 0.0}, reference_motor(), reference_drive(), 0.0, 0.0);
  CHECK(rest.d_angle == 0.0);
  CHECK(rest.d_speed == 0.0);
  CHECK(rest.tau_a == 0.0);

  // Linearity in (theta, omega, theta_h).
  const MotorParams& m = reference_motor();
  const DrivetrainConfig d = reference_drive();
  const MechDeriv a = backdriven_derivatives({0.3, -2.0}, m, d, 0.2, 1.0);
  const MechDeriv b = backdriven_derivatives({-0.1, 0.5}, m, d, -0.4, -3.0);
  const MechDeriv sum = backdriven_derivatives({0.2, -1.5}, m, d, -0.2, -2.0);
  CHECK(sum.d_speed == doctest::Approx(a.d_speed + b.d_speed).epsilon(1e-12));
  CHECK(sum.tau_a == doctest::Approx(a.tau_a + b.tau_a).epsilon(1e-12));
}

TEST_CASE("ideal gear identities hold in the expanded plant state") {
  const DrivetrainConfig d = reference_drive();
  const PlantState s = make_plant_state({1.8, -3.0}, 2.5, d, 0.25, 0.0);
  CHECK(s.gear_output_angle == doctest::Approx(1.8 / 36.0).epsilon(1e-15));
  CHECK(s.gear_output_torque ==
        doctest::Approx(36.0 * s.gear_input_torque).epsilon(1e-15));
  CHECK(s.output_torque ==
        doctest::Approx(d.coupling_stiffness * (1.8 / 36.0 - 0.25))
            .epsilon(1e-12));
}

TEST_CASE("drivetrain and gain validation") {
  DrivetrainConfig d;
  d.gear_ratio = 0.5;
  CHECK_THROWS_AS(d.validate(), std::domain_error);
  d = DrivetrainConfig{};
  d.coupling_stiffness = 0.0;
  CHECK_THROWS_AS(d.validate(), std::domain_error);
  ControlGains g;
  g.kp = 0.0;
  CHECK_THROWS_AS(g.validate(), std::domain_error);
  g = ControlGains{};
  g.ki = -1.0;
  CHECK_THROWS_AS(g.validate(), std::domain_error);
}
