#pragma once

#include <optional>
#include <string>
#include <vector>

namespace exoopt {

// Finite cosine series  theta(t) = offset + sum_i a_i*cos(2*pi*f_i*t + phi_i).
// Carried alongside synthetic traces so downstream consumers can evaluate the
// waveform and its derivative exactly at arbitrary times.
struct HarmonicSeries {
  struct Term {
    double amplitude;  // rad
    double freq_hz;
    double phase;      // rad
  };
  double offset = 0.0;
  std::vector<Term> terms;

  double angle(double t) const;
  double speed(double t) const;
  double fundamental_hz() const;
};

// Uniformly sampled gait record.  Sample k sits at t = k*dt; a trace of N
// samples spans [0, N*dt) so that exactly periodic waveforms contain whole
// cycles without a duplicated endpoint.
struct GaitTrace {
  double dt = 0.0;
  std::vector<std::string> names;            // column names, time excluded
  std::vector<std::vector<double>> columns;  // one vector per name
  std::optional<HarmonicSeries> knee_model;  // set by synthetic generators

  std::size_t samples() const { return columns.empty() ? 0 : columns[0].size(); }
  double duration() const { return static_cast<double>(samples()) * dt; }
  const std::vector<double>* find(const std::string& name) const;
  void validate() const;  // throws std::invalid_argument
};

// Physiological knee range (with margin) enforced on angle columns.
inline constexpr double kKneeAngleMin = -1.5707963267948966;  // rad
inline constexpr double kKneeAngleMax = 3.141592653589793;    // rad

// Two-harmonic normative knee flexion waveform (flexion positive, spanning
// roughly 0..37 degrees at unit scale) with its analytic velocity:
//   theta_h(t) = A*(0.35 - 0.28*cos(2*pi*f*t) - 0.17*cos(4*pi*f*t - 0.6))
HarmonicSeries knee_waveform(double cycle_freq_hz, double amplitude_scale);

GaitTrace synthetic_knee_trace(double cycle_freq_hz, double duration_s,
                               double dt, double amplitude_scale = 1.0);

// Left leg carries the base waveform, right leg the same waveform shifted by
// phase_offset (fraction of a cycle, default anti-phase).
GaitTrace two_leg_synthetic(double cycle_freq_hz, double duration_s, double dt,
                            double phase_offset = 0.5);

// CSV round trip.  Header row names the columns with unit suffixes; the first
// column must be time_s.  Columns tagged _deg (or _deg_s) are converted to
// radians on load and renamed.  Unknown columns are preserved.  Lines starting
// with '#' are comments.
GaitTrace load_trace(const std::string& path);
void save_trace(const GaitTrace& trace, const std::string& path);

// Resamples every column to a new uniform step.  Traces are treated as
// periodic: the gap between the last sample and the wrap-around is
// interpolated against sample zero.
GaitTrace resample(const GaitTrace& trace, double new_dt);

// Continuous-time knee angle for the back-driven simulations.  Exact when the
// trace carries its harmonic model, cubic Hermite on the samples otherwise,
// periodic in both cases.
class GaitInput {
 public:
  explicit GaitInput(const GaitTrace& trace);
  explicit GaitInput(const HarmonicSeries& model);

  double angle(double t) const;
  double speed(double t) const;
  double period() const { return period_; }

 private:
  std::optional<HarmonicSeries> model_;
  std::vector<double> theta_;
  std::vector<double> vel_;
  double dt_ = 0.0;
  double period_ = 0.0;
};

}  // namespace exoopt
