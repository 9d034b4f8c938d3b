#include "exoopt/csv_io.hpp"

#include <cstdio>

namespace exoopt {

namespace {

void put_comments(std::ostream& out, const std::vector<std::string>& comments) {
  for (const std::string& c : comments) out << "# " << c << "\n";
}

void put_number(std::ostream& out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  out << buf;
}

template <class Columns>
void put_rows(std::ostream& out, std::size_t rows, const Columns& columns) {
  for (std::size_t k = 0; k < rows; ++k) {
    bool first = true;
    for (const auto* col : columns) {
      if (!first) out << ",";
      put_number(out, (*col)[k]);
      first = false;
    }
    out << "\n";
  }
}

}  // namespace

void write_csv(std::ostream& out, const SimTrace& trace,
               const std::vector<std::string>& comments) {
  put_comments(out, comments);
  out << "time_s,motor_angle_rad,motor_speed_rad_s,current_a,tau_a_nm,"
         "output_speed_rad_s\n";
  put_rows(out, trace.time.size(),
           std::vector<const std::vector<double>*>{
               &trace.time, &trace.motor_angle, &trace.motor_speed,
               &trace.current, &trace.tau_a, &trace.output_speed});
}

void write_csv(std::ostream& out, const FrequencyResponse& fr,
               const std::vector<std::string>& comments) {
  put_comments(out, comments);
  out << "freq_hz,magnitude_db,phase_deg\n";
  put_rows(out, fr.freq_hz.size(),
           std::vector<const std::vector<double>*>{
               &fr.freq_hz, &fr.magnitude_db, &fr.phase_deg});
}

void write_csv(std::ostream& out, const GridResult& grid,
               const std::vector<std::string>& comments) {
  put_comments(out, comments);
  out << "gap_radius_m,gear_ratio," << grid_metric_name(grid.metric) << "\n";
  for (std::size_t i = 0; i < grid.gap_radius.size(); ++i) {
    for (std::size_t j = 0; j < grid.gear_ratio.size(); ++j) {
      put_number(out, grid.gap_radius[i]);
      out << ",";
      put_number(out, grid.gear_ratio[j]);
      out << ",";
      put_number(out, grid.at(i, j));
      out << "\n";
    }
  }
}

void write_csv(std::ostream& out, const ControllerTrace& trace,
               const std::vector<std::string>& comments) {
  put_comments(out, comments);
  out << "time_s,q_r_rad,q_l_rad,y_raw,y,tau_r_nm,tau_l_nm\n";
  put_rows(out, trace.time.size(),
           std::vector<const std::vector<double>*>{
               &trace.time, &trace.q_r, &trace.q_l, &trace.y_raw, &trace.y,
               &trace.tau_r, &trace.tau_l});
}

}  // namespace exoopt
