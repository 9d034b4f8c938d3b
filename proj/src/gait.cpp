#include "exoopt/gait.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace exoopt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;

bool is_angle_column(const std::string& name) {
  return name == "theta_h_rad" || name == "q_r_rad" || name == "q_l_rad";
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

double HarmonicSeries::angle(double t) const {
  double a = offset;
  for (const Term& term : terms)
    a += term.amplitude * std::cos(kTwoPi * term.freq_hz * t + term.phase);
  return a;
}

double HarmonicSeries::speed(double t) const {
  double v = 0.0;
  for (const Term& term : terms)
    v -= term.amplitude * kTwoPi * term.freq_hz *
         std::sin(kTwoPi * term.freq_hz * t + term.phase);
  return v;
}

double HarmonicSeries::fundamental_hz() const {
  double f = std::numeric_limits<double>::infinity();
  for (const Term& term : terms)
    if (term.freq_hz > 0.0) f = std::min(f, term.freq_hz);
  if (!std::isfinite(f))
    throw std::invalid_argument("harmonic series has no oscillating term");
  return f;
}

const std::vector<double>* GaitTrace::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return &columns[i];
  return nullptr;
}

void GaitTrace::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("gait trace dt must be positive");
  if (names.size() != columns.size())
    throw std::invalid_argument("gait trace column/name count mismatch");
  const std::size_t n = samples();
  if (n == 0) throw std::invalid_argument("gait trace is empty");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].size() != n)
      throw std::invalid_argument("gait trace columns have unequal lengths");
    if (is_angle_column(names[i])) {
      for (double x : columns[i]) {
        if (!std::isfinite(x) || x < kKneeAngleMin || x > kKneeAngleMax) {
          throw std::invalid_argument("angle column " + names[i] +
                                      " leaves the physiological knee range");
        }
      }
    }
  }
}

HarmonicSeries knee_waveform(double cycle_freq_hz, double amplitude_scale) {
  if (!(cycle_freq_hz > 0.0))
    throw std::invalid_argument("cycle frequency must be positive");
  HarmonicSeries model;
  model.offset = 0.35 * amplitude_scale;
  model.terms = {
      {-0.28 * amplitude_scale, cycle_freq_hz, 0.0},
      {-0.17 * amplitude_scale, 2.0 * cycle_freq_hz, -0.6},
  };
  return model;
}

GaitTrace synthetic_knee_trace(double cycle_freq_hz, double duration_s,
                               double dt, double amplitude_scale) {
  if (!(cycle_freq_hz > 0.0))
    throw std::invalid_argument("cycle frequency must be positive");
  if (!(duration_s >= 1.0 / cycle_freq_hz))
    throw std::invalid_argument("duration must cover at least one gait cycle");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");

  const HarmonicSeries model = knee_waveform(cycle_freq_hz, amplitude_scale);
  const std::size_t n =
      static_cast<std::size_t>(std::llround(duration_s / dt));
  GaitTrace trace;
  trace.dt = dt;
  trace.names = {"theta_h_rad", "theta_h_vel_rad_s"};
  trace.columns.assign(2, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    trace.columns[0][k] = model.angle(t);
    trace.columns[1][k] = model.speed(t);
  }
  trace.knee_model = model;
  trace.validate();
  return trace;
}

GaitTrace two_leg_synthetic(double cycle_freq_hz, double duration_s, double dt,
                            double phase_offset) {
  if (!(phase_offset >= 0.0 && phase_offset < 1.0))
    throw std::invalid_argument("phase offset must lie in [0, 1)");
  if (!(cycle_freq_hz > 0.0))
    throw std::invalid_argument("cycle frequency must be positive");
  if (!(duration_s >= 1.0 / cycle_freq_hz))
    throw std::invalid_argument("duration must cover at least one gait cycle");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");

  const HarmonicSeries model = knee_waveform(cycle_freq_hz, 1.0);
  const double shift = phase_offset / cycle_freq_hz;
  const std::size_t n =
      static_cast<std::size_t>(std::llround(duration_s / dt));
  GaitTrace trace;
  trace.dt = dt;
  trace.names = {"q_r_rad", "q_l_rad"};
  trace.columns.assign(2, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    trace.columns[0][k] = model.angle(t - shift);
    trace.columns[1][k] = model.angle(t);
  }
  trace.validate();
  return trace;
}

GaitTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gait trace file " + path);

  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      return true;
    }
    return false;
  };

  if (!next_line())
    throw std::runtime_error("gait trace file " + path + " has no header");

  std::vector<std::string> headers;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      field.erase(0, field.find_first_not_of(" \t"));
      field.erase(field.find_last_not_of(" \t") + 1);
      headers.push_back(field);
    }
  }
  if (headers.empty() || headers[0] != "time_s")
    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                             ": first column must be time_s");

  std::vector<double> times;
  std::vector<std::size_t> row_lines;
  std::vector<std::vector<double>> cols(headers.size() - 1);
  while (next_line()) {
    row_lines.push_back(line_no);
    std::stringstream ss(line);
    std::string field;
    std::size_t idx = 0;
    while (std::getline(ss, field, ',')) {
      double value = 0.0;
      try {
        value = std::stod(field);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": cannot parse number '" + field + "'");
      }
      if (idx == 0) {
        times.push_back(value);
      } else if (idx <= cols.size()) {
        cols[idx - 1].push_back(value);
      }
      ++idx;
    }
    if (idx != headers.size())
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(headers.size()) +
                               " fields, found " + std::to_string(idx));
  }
  if (times.size() < 2)
    throw std::runtime_error(path + ": need at least two samples");

  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw std::runtime_error(path + ":2: non-increasing time");
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double expected = times[0] + static_cast<double>(k) * dt;
    if (std::fabs(times[k] - expected) > 1e-6) {
      throw std::runtime_error(path + ":" + std::to_string(row_lines[k]) +
                               ": non-uniform timestamp (expected " +
                               std::to_string(expected) + ")");
    }
  }

  GaitTrace trace;
  trace.dt = dt;
  for (std::size_t i = 1; i < headers.size(); ++i) {
    std::string name = headers[i];
    std::vector<double>& col = cols[i - 1];
    if (ends_with(name, "_deg")) {
      for (double& x : col) x *= kDegToRad;
      name = name.substr(0, name.size() - 4) + "_rad";
    } else if (ends_with(name, "_deg_s")) {
      for (double& x : col) x *= kDegToRad;
      name = name.substr(0, name.size() - 6) + "_rad_s";
    }
    trace.names.push_back(name);
    trace.columns.push_back(std::move(col));
  }
  trace.validate();
  return trace;
}

void save_trace(const GaitTrace& trace, const std::string& path) {
  trace.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write gait trace file " + path);
  out << "time_s";
  for (const std::string& name : trace.names) out << "," << name;
  out << "\n";
  char buf[32];
  const std::size_t n = trace.samples();
  for (std::size_t k = 0; k < n; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(k) * trace.dt);
    out << buf;
    for (const auto& col : trace.columns) {
      std::snprintf(buf, sizeof buf, "%.17g", col[k]);
      out << "," << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing gait trace " + path);
}

namespace {

// Periodic cubic Hermite over uniform samples.
double hermite_eval(const std::vector<double>& y, const std::vector<double>& v,
                    double dt, double t, bool derivative) {
  const std::size_t n = y.size();
  const double period = static_cast<double>(n) * dt;
  double u = std::fmod(t, period);
  if (u < 0.0) u += period;
  std::size_t k = static_cast<std::size_t>(u / dt);
  if (k >= n) k = n - 1;
  const std::size_t k1 = (k + 1) % n;
  const double x = (u - static_cast<double>(k) * dt) / dt;
  const double y0 = y[k], y1 = y[k1];
  const double m0 = v[k] * dt, m1 = v[k1] * dt;
  if (!derivative) {
    const double h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
    const double h10 = x * (1.0 - x) * (1.0 - x);
    const double h01 = x * x * (3.0 - 2.0 * x);
    const double h11 = x * x * (x - 1.0);
    return h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
  }
  const double d00 = 6.0 * x * (x - 1.0);
  const double d10 = (1.0 - x) * (1.0 - 3.0 * x);
  const double d01 = 6.0 * x * (1.0 - x);
  const double d11 = x * (3.0 * x - 2.0);
  return (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / dt;
}

std::vector<double> central_diff(const std::vector<double>& y, double dt) {
  const std::size_t n = y.size();
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t prev = (k + n - 1) % n;
    const std::size_t next = (k + 1) % n;
    v[k] = (y[next] - y[prev]) / (2.0 * dt);
  }
  return v;
}

}  // namespace

GaitTrace resample(const GaitTrace& trace, double new_dt) {
  trace.validate();
  if (!(new_dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const std::size_t n_new = static_cast<std::size_t>(
      std::llround(trace.duration() / new_dt));
  if (n_new < 2) throw std::invalid_argument("resample target too coarse");

  GaitTrace out;
  out.dt = new_dt;
  out.names = trace.names;
  out.knee_model = trace.knee_model;
  out.columns.assign(trace.columns.size(), std::vector<double>(n_new));
  for (std::size_t i = 0; i < trace.columns.size(); ++i) {
    // Pair an angle column with its stored velocity column when present.
    const std::vector<double>* vel = nullptr;
    if (ends_with(trace.names[i], "_rad")) {
      const std::string base =
          trace.names[i].substr(0, trace.names[i].size() - 4);
      vel = trace.find(base + "_vel_rad_s");
    }
    const std::vector<double> fallback =
        vel ? std::vector<double>{} : central_diff(trace.columns[i], trace.dt);
    const std::vector<double>& v = vel ? *vel : fallback;
    for (std::size_t k = 0; k < n_new; ++k) {
      const double t = static_cast<double>(k) * new_dt;
      out.columns[i][k] =
          hermite_eval(trace.columns[i], v, trace.dt, t, false);
    }
  }
  return out;
}

GaitInput::GaitInput(const GaitTrace& trace) {
  trace.validate();
  if (trace.knee_model) {
    model_ = trace.knee_model;
    period_ = 1.0 / model_->fundamental_hz();
    return;
  }
  const std::vector<double>* theta = trace.find("theta_h_rad");
  if (!theta) {
    // A one-angle trace under any name is acceptable as the knee input.
    if (trace.columns.size() == 1) {
      theta = &trace.columns[0];
    } else {
      throw std::invalid_argument(
          "gait trace lacks a theta_h_rad column for the knee input");
    }
  }
  theta_ = *theta;
  const std::vector<double>* vel = trace.find("theta_h_vel_rad_s");
  vel_ = vel ? *vel : central_diff(theta_, trace.dt);
  dt_ = trace.dt;
  period_ = trace.duration();
}

GaitInput::GaitInput(const HarmonicSeries& model)
    : model_(model), period_(1.0 / model.fundamental_hz()) {}

double GaitInput::angle(double t) const {
  if (model_) return model_->angle(t);
  return hermite_eval(theta_, vel_, dt_, t, false);
}

double GaitInput::speed(double t) const {
  if (model_) return model_->speed(t);
  return hermite_eval(theta_, vel_, dt_, t, true);
}

}  // namespace exoopt
