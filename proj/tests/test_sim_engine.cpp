#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "exoopt/motor.hpp"
#include "exoopt/plant.hpp"
#include "exoopt/sim.hpp"
#include "oracle_helpers.hpp"

using namespace exoopt;

namespace {

DrivetrainConfig drive(double n = 36.0, double kc = 100.0, double v = 42.0) {
  DrivetrainConfig d;
  d.gear_ratio = n;
  d.coupling_stiffness = kc;
  d.supply_voltage = v;
  return d;
}

std::array<double, 2> backdrive_state(const MotorParams& m,
                                      const DrivetrainConfig& d,
                                      const HarmonicSeries& gait, double t_end,
                                      double dt) {
  auto deriv = [&](double t, const std::array<double, 2>& x) {
    const MechDeriv out = backdriven_derivatives(MechState{x[0], x[1]}, m, d,
                                                 gait.angle(t), gait.speed(t));
    return std::array<double, 2>{out.d_angle, out.d_speed};
  };
  return integrate<2>(deriv, {0.0, 0.0}, t_end, dt).back();
}

}  // namespace

TEST_CASE("integrator reproduces the exponential decay") {
  auto deriv = [](double, const std::array<double, 1>& x) {
    return std::array<double, 1>{-x[0]};
  };
  const auto states = integrate<1>(deriv, {1.0}, 1.0, 1e-3);
  CHECK(states.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("integrator keeps a zero-derivative state constant") {
  auto deriv = [](double, const std::array<double, 2>&) {
    return std::array<double, 2>{0.0, 0.0};
  };
  const auto states = integrate<2>(deriv, {0.7, -2.5}, 0.5, 1e-3);
  for (const auto& s : states) {
    CHECK(s[0] == 0.7);
    CHECK(s[1] == -2.5);
  }
}

TEST_CASE("integrator reports divergence with the step index") {
  auto blowup = [](double, const std::array<double, 1>& x) {
    return std::array<double, 1>{x[0] * x[0]};
  };
  CHECK_THROWS_AS(integrate<1>(blowup, {1e200}, 1.0, 0.25), DivergenceError);
  try {
    integrate<1>(blowup, {1e200}, 1.0, 0.25);
  } catch (const DivergenceError& e) {
    CHECK(e.step() >= 1);
  }
}

TEST_CASE("halving the step barely moves the backdrive end state") {
  const MotorParams& m = reference_motor();
  const DrivetrainConfig d = drive();
  const HarmonicSeries gait = knee_waveform(1.0, 1.0);
  const auto coarse = backdrive_state(m, d, gait, 2.0, 1e-3);
  const auto fine = backdrive_state(m, d, gait, 2.0, 5e-4);
  CHECK(std::fabs(coarse[0] - fine[0]) <
        1e-6 * std::max(1.0, std::fabs(fine[0])));
  CHECK(std::fabs(coarse[1] - fine[1]) <
        1e-6 * std::max(1.0, std::fabs(fine[1])));
}

TEST_CASE("fourth-order self convergence on the backdrive scenario") {
  const MotorParams& m = reference_motor();
  const DrivetrainConfig d = drive();
  const HarmonicSeries gait = knee_waveform(1.0, 1.0);
  const auto x1 = backdrive_state(m, d, gait, 2.0, 1e-3);
  const auto x2 = backdrive_state(m, d, gait, 2.0, 5e-4);
  const auto x3 = backdrive_state(m, d, gait, 2.0, 2.5e-4);
  const double e1 = std::hypot(x1[0] - x2[0], (x1[1] - x2[1]) / 100.0);
  const double e2 = std::hypot(x2[0] - x3[0], (x2[1] - x3[1]) / 100.0);
  const double ratio = e1 / e2;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("max torque of the reference design") {
  const double peak = simulate_max_torque(reference_motor(), drive());
  CHECK(peak >= 23.7);
  CHECK(peak >= oracle::locked_tau_ss(reference_motor(), 36.0) * 0.9999);
  CHECK(peak <= 25.0);
}

TEST_CASE("max torque matches the trace route") {
  const SimTrace trace = locked_output_trace(reference_motor(), drive(), 42.0);
  double peak = 0.0;
  for (double tau : trace.tau_a) peak = std::max(peak, std::fabs(tau));
  const double kernel = simulate_max_torque(reference_motor(), drive());
  CHECK(kernel == doctest::Approx(peak).epsilon(1e-9));
  // Trace tail sits at the saturated steady state.
  CHECK(trace.tau_a.back() == doctest::Approx(23.76).epsilon(1e-4));
}

TEST_CASE("tiny low-ratio design: steady torque and transient peak") {
  const MotorParams m = scale_motor(0.0105);
  const DrivetrainConfig d = drive(1.0);
  const double tau_ss = oracle::locked_tau_ss(m, 1.0);
  CHECK(tau_ss == doctest::Approx(0.165).epsilon(1e-12));
  const SimTrace trace = locked_output_trace(m, d, 42.0);
  CHECK(trace.tau_a.back() == doctest::Approx(tau_ss).epsilon(1e-3));
  // Underdamped here, so the peak carries the step overshoot.
  const double expected_peak = tau_ss * oracle::locked_overshoot(m, 1.0, 100.0);
  const double peak = simulate_max_torque(m, d);
  CHECK(peak == doctest::Approx(expected_peak).epsilon(5e-3));
}

TEST_CASE("locked steady states match the algebra for random designs") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> radius(0.008, 0.05);
  std::uniform_real_distribution<double> ratio(1.0, 50.0);
  for (int i = 0; i < 10; ++i) {
    const MotorParams m = scale_motor(radius(rng));
    const double n = ratio(rng);
    const SimTrace trace = locked_output_trace(m, drive(n), 42.0);
    CHECK(trace.tau_a.back() ==
          doctest::Approx(oracle::locked_tau_ss(m, n)).epsilon(0.01));
  }
}

TEST_CASE("max speed of the reference design (clamp-limited)") {
  const double speed = simulate_max_speed(reference_motor(), drive());
  const double expected = oracle::free_speed_ss(reference_motor(), 42.0) / 36.0;
  CHECK(expected == doctest::Approx(66.0 / 36.0).epsilon(1e-12));
  CHECK(speed == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("max speed at low voltage follows the unsaturated balance") {
  const double speed =
      simulate_max_speed(reference_motor(), drive(36.0, 100.0, 7.0));
  const double w_ss = 7.0 * 0.04 / (0.74 * 0.01 + 0.04 * 0.04);
  CHECK(w_ss == doctest::Approx(31.111).epsilon(1e-4));
  CHECK(speed == doctest::Approx(w_ss / 36.0).epsilon(0.01));
}

TEST_CASE("doubling the gear ratio exactly halves the output speed") {
  const double s1 = simulate_max_speed(reference_motor(), drive(18.0));
  const double s2 = simulate_max_speed(reference_motor(), drive(36.0));
  CHECK(s1 == doctest::Approx(2.0 * s2).epsilon(1e-12));
}

TEST_CASE("free steady states match the algebra for random designs") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> radius(0.008, 0.05);
  std::uniform_real_distribution<double> ratio(1.0, 50.0);
  for (int i = 0; i < 10; ++i) {
    const MotorParams m = scale_motor(radius(rng));
    const double n = ratio(rng);
    const double speed = simulate_max_speed(m, drive(n));
    CHECK(speed ==
          doctest::Approx(oracle::free_speed_ss(m, 42.0) / n).epsilon(0.01));
  }
}

TEST_CASE("zero-amplitude gait backdrives nothing") {
  const GaitInput gait(knee_waveform(1.0, 0.0));
  const BackdriveMetrics r =
      simulate_backdrive(reference_motor(), drive(), gait);
  CHECK(r.rms == 0.0);
  CHECK(r.peak == 0.0);
}

TEST_CASE("single-tone backdrive RMS matches the frequency-domain gain") {
  const MotorParams& m = reference_motor();
  for (double f : {0.5, 1.0, 2.0}) {
    HarmonicSeries tone;
    tone.terms = {{0.25, f, -std::numbers::pi / 2.0}};  // 0.25*sin(2*pi*f*t)
    const BackdriveMetrics r =
        simulate_backdrive(m, drive(), GaitInput(tone));
    const double expected =
        oracle::backdrive_gain(m, 36.0, 100.0, f) * 0.25 / std::sqrt(2.0);
    CHECK(r.rms == doctest::Approx(expected).epsilon(0.02));
    CHECK(r.peak == doctest::Approx(expected * std::sqrt(2.0)).epsilon(0.02));
  }
}

TEST_CASE("backdrive superposition (linearity of the unpowered drive)") {
  const MotorParams& m = reference_motor();
  const DrivetrainConfig d = drive();
  HarmonicSeries h1;
  h1.terms = {{0.2, 1.0, 0.0}};
  HarmonicSeries h2;
  h2.terms = {{0.1, 2.0, -0.6}};
  HarmonicSeries both;
  both.terms = {h1.terms[0], h2.terms[0]};
  const auto xa = backdrive_state(m, d, h1, 1.5, 1e-4);
  const auto xb = backdrive_state(m, d, h2, 1.5, 1e-4);
  const auto xc = backdrive_state(m, d, both, 1.5, 1e-4);
  CHECK(xc[0] == doctest::Approx(xa[0] + xb[0]).epsilon(1e-9));
  CHECK(xc[1] == doctest::Approx(xa[1] + xb[1]).epsilon(1e-9));
}

TEST_CASE("doubling the gait amplitude doubles the torque trajectory") {
  const MotorParams& m = reference_motor();
  const GaitInput g1(knee_waveform(1.0, 0.5));
  const GaitInput g2(knee_waveform(1.0, 1.0));
  const BackdriveMetrics r1 = simulate_backdrive(m, drive(), g1);
  const BackdriveMetrics r2 = simulate_backdrive(m, drive(), g2);
  CHECK(r2.rms == doctest::Approx(2.0 * r1.rms).epsilon(1e-9));
  CHECK(r2.peak == doctest::Approx(2.0 * r1.peak).epsilon(1e-9));
}

TEST_CASE("backdrive metrics agree with the trace route") {
  const MotorParams& m = reference_motor();
  const DrivetrainConfig d = drive();
  const GaitInput gait(knee_waveform(1.0, 1.0));
  const BackdriveMetrics metrics = simulate_backdrive(m, d, gait);
  const SimTrace trace = backdrive_trace(m, d, gait, 3);
  const std::size_t spc = 20000;
  double sumsq = 0.0, peak = 0.0;
  for (std::size_t k = spc; k < 3 * spc; ++k) {
    sumsq += trace.tau_a[k] * trace.tau_a[k];
    peak = std::max(peak, std::fabs(trace.tau_a[k]));
  }
  CHECK(metrics.rms ==
        doctest::Approx(std::sqrt(sumsq / (2.0 * spc))).epsilon(1e-9));
  CHECK(metrics.peak == doctest::Approx(peak).epsilon(1e-9));
}

TEST_CASE("gait traces loaded from samples feed the backdrive simulation") {
  const MotorParams& m = reference_motor();
  const GaitTrace trace = synthetic_knee_trace(1.0, 1.0, 1e-3);
  GaitTrace sampled = trace;
  sampled.knee_model.reset();
  const BackdriveMetrics exact = simulate_backdrive(m, drive(), trace);
  const BackdriveMetrics interp = simulate_backdrive(m, drive(), sampled);
  CHECK(interp.rms == doctest::Approx(exact.rms).epsilon(1e-4));
  CHECK(interp.peak == doctest::Approx(exact.peak).epsilon(1e-4));
}

TEST_CASE("frequency response of a first-order pole") {
  const RationalTF tf({1.0}, {1.0, 1.0});
  const double f_corner = 1.0 / (2.0 * std::numbers::pi);
  const FrequencyResponse fr = frequency_response(tf, f_corner, 10.0, 5);
  CHECK(fr.freq_hz.front() == doctest::Approx(f_corner).epsilon(1e-12));
  CHECK(fr.magnitude_db.front() ==
        doctest::Approx(20.0 * std::log10(1.0 / std::sqrt(2.0)))
            .epsilon(1e-9));
  CHECK(fr.phase_deg.front() == doctest::Approx(-45.0).epsilon(1e-9));
  CHECK(fr.freq_hz.size() == 5);
  for (std::size_t i = 1; i < fr.freq_hz.size(); ++i) {
    CHECK(fr.freq_hz[i] > fr.freq_hz[i - 1]);
    CHECK(fr.magnitude_db[i] < fr.magnitude_db[i - 1]);
  }
}

TEST_CASE("closed-loop DC magnitude in dB") {
  const RationalTF tf = closed_loop_torque_tf(reference_motor(), drive(), {});
  const FrequencyResponse fr = frequency_response(tf, 1e-4, 1.0, 30);
  const double expected = 20.0 * std::log10(144.0 / 218.0);
  CHECK(fr.magnitude_db.front() == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("second-order magnitude: resonant vs damped") {
  // zeta = 0.3: single interior peak at wn*sqrt(1-2*zeta^2); zeta = 1: flat
  // decay.  wn = 10 rad/s.
  const RationalTF peaked({100.0}, {1.0, 2.0 * 0.3 * 10.0, 100.0});
  const RationalTF damped({100.0}, {1.0, 2.0 * 1.0 * 10.0, 100.0});
  const double peak_hz = 10.0 * std::sqrt(1.0 - 2.0 * 0.09) /
                         (2.0 * std::numbers::pi);
  CHECK(peaked.magnitude(peak_hz) > peaked.magnitude(peak_hz * 0.5));
  CHECK(peaked.magnitude(peak_hz) > peaked.magnitude(peak_hz * 2.0));
  const double expected_peak = 1.0 / (2.0 * 0.3 * std::sqrt(1.0 - 0.09));
  CHECK(peaked.magnitude(peak_hz) ==
        doctest::Approx(expected_peak).epsilon(1e-9));
  double prev = damped.magnitude(1e-3);
  for (double f = 0.01; f < 100.0; f *= 1.5) {
    const double mag = damped.magnitude(f);
    CHECK(mag <= prev * (1.0 + 1e-12));
    prev = mag;
  }
}

TEST_CASE("-3 dB bandwidth of a first-order pole") {
  const RationalTF tf({1.0}, {1.0, 1.0});
  CHECK(bandwidth_neg3db(tf) ==
        doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(5e-3));
}

TEST_CASE("pure gain never crosses -3 dB") {
  const RationalTF tf({2.0}, {1.0});
  CHECK_THROWS_AS(bandwidth_neg3db(tf), NotFoundError);
}

TEST_CASE("closed-loop -3 dB bandwidth matches the quadratic-solve oracle") {
  const RationalTF tf = closed_loop_torque_tf(reference_motor(), drive(), {});
  const double expected =
      oracle::neg3db_second_order(tf.den[0], tf.den[1], tf.den[2]);
  CHECK(bandwidth_neg3db(tf) == doctest::Approx(expected).epsilon(1e-3));
  // Heavy damping (zeta ~ 4) pushes the -3 dB point far below the natural
  // frequency of
  // 24.1 Hz; it lands near 3 Hz for the prototype parameters.
  CHECK(expected == doctest::Approx(3.03).epsilon(0.02));
}

TEST_CASE("time-domain torque tracking matches the transfer function") {
  const MotorParams& m = reference_motor();
  const DrivetrainConfig d = drive();
  const RationalTF tf = closed_loop_torque_tf(m, d, {});
  for (double f : {1.0, 5.0}) {
    const double gain = torque_tracking_gain(m, d, {}, f, 0.5);
    CHECK(gain == doctest::Approx(tf.magnitude(f)).epsilon(0.02));
  }
}
