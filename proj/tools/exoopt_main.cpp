// exoopt: sizing and analysis CLI for the knee-exoskeleton actuator models.
//
// Subcommands: evaluate, optimize, grid, bode, controller, trace.
// Exit codes: 0 success, 2 validation/usage error, 3 infeasible or diverged.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "exoopt/controller.hpp"
#include "exoopt/csv_io.hpp"
#include "exoopt/json_io.hpp"
#include "exoopt/motor.hpp"
#include "exoopt/optimizer.hpp"
#include "exoopt/run_config.hpp"
#include "exoopt/sim.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutputTarget {
  std::string path;  // empty -> stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << text;
  }
};

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

exoopt::AxisSpec parse_axis(const std::string& text) {
  double lo = 0.0, hi = 0.0;
  long count = 0;
  char c1 = 0, c2 = 0;
  std::istringstream ss(text);
  if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' ||
      !ss.eof() || count < 1) {
    throw UsageError("malformed range '" + text + "', expected lo:hi:count");
  }
  return {lo, hi, static_cast<std::size_t>(count)};
}

std::vector<double> parse_age_range(const std::string& text) {
  double lo = 0.0, hi = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream ss(text);
  if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
      !ss.eof() || !(step > 0.0) || hi < lo) {
    throw UsageError("malformed age range '" + text + "', expected lo:hi:step");
  }
  std::vector<double> ages;
  for (double a = lo; a <= hi + 1e-9; a += step) ages.push_back(a);
  return ages;
}

// Applies the config file (flag or EXOOPT_CONFIG) before CLI flags override
// individual fields.
void load_config_document(const std::string& explicit_path,
                          exoopt::RunConfig& cfg) {
  std::string path = explicit_path;
  if (path.empty()) {
    if (const char* env = std::getenv("EXOOPT_CONFIG")) path = env;
  }
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json doc = json::parse(in);
  cfg.merge_json(doc);
}

struct CommonFlags {
  std::string config_path;
  exoopt::RunConfig cfg;
  OutputTarget out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "JSON config document (or set EXOOPT_CONFIG)");
    cmd->add_option("--kc", cfg.coupling_stiffness,
                    "coupling stiffness, N*m/rad");
    cmd->add_option("--voltage", cfg.supply_voltage, "supply voltage, V");
    cmd->add_option("--kp", cfg.kp, "torque-loop proportional gain");
    cmd->add_option("--dt", cfg.dt, "integration step, s");
    cmd->add_option("--rg-min", cfg.bounds.min_gap_radius,
                    "search lower bound on the gap radius, m");
    cmd->add_option("--rg-max", cfg.bounds.max_gap_radius,
                    "search upper bound on the gap radius, m");
    cmd->add_option("--n-min", cfg.bounds.min_gear_ratio,
                    "search lower bound on the gear ratio");
    cmd->add_option("--n-max", cfg.bounds.max_gear_ratio,
                    "search upper bound on the gear ratio");
    cmd->add_option("--gait-freq", cfg.gait_freq_hz,
                    "walking cycle frequency, Hz");
    cmd->add_option("--gait-amplitude", cfg.gait_amplitude,
                    "knee waveform amplitude scale");
    cmd->add_option("--jobs", cfg.jobs, "parallel workers for grids/sweeps");
    cmd->add_option("--simd", cfg.simd,
                    "kernel instruction set: auto|scalar|avx2|neon");
    cmd->add_option("--out", out.path, "output file (default stdout)");
  }
};

// The config file provides the base values, so re-parse flags on top of it.
// CLI11 already wrote flag values into cfg; to get the documented precedence
// (defaults < file < flags) the config document is loaded into a fresh struct
// and flag-touched fields are copied back over it.
struct ConfigResolver {
  CommonFlags& common;
  CLI::App* cmd;

  void finish() {
    exoopt::RunConfig base;
    load_config_document(common.config_path, base);
    auto keep = [&](const char* flag, auto member) {
      if (cmd->count(flag) == 0) common.cfg.*member = base.*member;
    };
    keep("--kc", &exoopt::RunConfig::coupling_stiffness);
    keep("--voltage", &exoopt::RunConfig::supply_voltage);
    keep("--kp", &exoopt::RunConfig::kp);
    keep("--dt", &exoopt::RunConfig::dt);
    keep("--gait-freq", &exoopt::RunConfig::gait_freq_hz);
    keep("--gait-amplitude", &exoopt::RunConfig::gait_amplitude);
    keep("--jobs", &exoopt::RunConfig::jobs);
    keep("--simd", &exoopt::RunConfig::simd);
    if (cmd->count("--rg-min") == 0)
      common.cfg.bounds.min_gap_radius = base.bounds.min_gap_radius;
    if (cmd->count("--rg-max") == 0)
      common.cfg.bounds.max_gap_radius = base.bounds.max_gap_radius;
    if (cmd->count("--n-min") == 0)
      common.cfg.bounds.min_gear_ratio = base.bounds.min_gear_ratio;
    if (cmd->count("--n-max") == 0)
      common.cfg.bounds.max_gear_ratio = base.bounds.max_gear_ratio;
  }
};

exoopt::RequirementOverrides req_overrides(
    const std::optional<double>& torque, const std::optional<double>& speed,
    const std::optional<double>& bandwidth,
    const std::optional<double>& backdrive) {
  exoopt::RequirementOverrides o;
  if (torque) o.min_torque = *torque;
  if (speed) o.min_speed = *speed;
  if (bandwidth) o.min_bandwidth_hz = *bandwidth;
  if (backdrive) o.max_backdrive_torque = *backdrive;
  return o;
}

std::vector<std::string> csv_config_comments(const exoopt::RunConfig& cfg,
                                             const std::string& command) {
  return {"exoopt " + command, "config: " + cfg.to_json().dump()};
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Knee-exoskeleton actuator sizing and analysis"};
  app.require_subcommand(1);

  // --- evaluate ---
  auto* evaluate = app.add_subcommand(
      "evaluate", "check one (gap radius, gear ratio) design against the "
                  "age-specific constraints");
  CommonFlags ev_common;
  double ev_rg = 0.0, ev_n = 0.0, ev_age = 0.0;
  std::optional<double> ev_rt, ev_rs, ev_rb, ev_rd;
  evaluate->add_option("--rg", ev_rg, "motor gap radius, m")->required();
  evaluate->add_option("--n", ev_n, "gear ratio")->required();
  evaluate->add_option("--age", ev_age, "user age, years [3,18]")->required();
  evaluate->add_option("--req-torque", ev_rt, "override: min torque, N*m");
  evaluate->add_option("--req-speed", ev_rs, "override: min speed, rad/s");
  evaluate->add_option("--req-bandwidth", ev_rb, "override: min bandwidth, Hz");
  evaluate->add_option("--req-backdrive", ev_rd,
                       "override: max backdrive torque, N*m");
  ev_common.attach(evaluate);

  // --- optimize ---
  auto* optimize = app.add_subcommand(
      "optimize", "find the lightest feasible design for an age or age sweep");
  CommonFlags op_common;
  std::optional<double> op_age;
  std::string op_ages, op_method = "bisect", op_grid = "200x200";
  std::optional<double> op_rt, op_rs, op_rb, op_rd;
  optimize->add_option("--age", op_age, "single age, years");
  optimize->add_option("--ages", op_ages, "age sweep lo:hi:step");
  optimize->add_option("--method", op_method,
                       "bisect (default) or grid (brute-force oracle)");
  optimize->add_option("--grid-cells", op_grid,
                       "RxN grid for --method grid (default 200x200)");
  optimize->add_option("--req-torque", op_rt, "override: min torque, N*m");
  optimize->add_option("--req-speed", op_rs, "override: min speed, rad/s");
  optimize->add_option("--req-bandwidth", op_rb, "override: min bandwidth, Hz");
  optimize->add_option("--req-backdrive", op_rd,
                       "override: max backdrive torque, N*m");
  op_common.attach(optimize);

  // --- grid ---
  auto* grid = app.add_subcommand(
      "grid", "tabulate one design metric over a (gap radius, gear ratio) "
              "grid as CSV");
  CommonFlags gr_common;
  std::string gr_metric, gr_rg, gr_n;
  std::optional<double> gr_age;
  grid->add_option("--metric", gr_metric,
                   "max_torque|max_speed|natural_frequency|backdrive_avg|mass")
      ->required();
  grid->add_option("--rg", gr_rg, "gap-radius axis lo:hi:count")->required();
  grid->add_option("--n", gr_n, "gear-ratio axis lo:hi:count")->required();
  grid->add_option("--age", gr_age, "echoed into the output header");
  gr_common.attach(grid);

  // --- bode ---
  auto* bode = app.add_subcommand(
      "bode", "closed-loop torque-control frequency response as CSV");
  CommonFlags bo_common;
  double bo_rg = 0.0, bo_n = 0.0, bo_flo = 0.1, bo_fhi = 100.0;
  std::size_t bo_points = 200;
  bode->add_option("--rg", bo_rg, "motor gap radius, m")->required();
  bode->add_option("--n", bo_n, "gear ratio")->required();
  bode->add_option("--flo", bo_flo, "lowest frequency, Hz");
  bode->add_option("--fhi", bo_fhi, "highest frequency, Hz");
  bode->add_option("--points", bo_points, "number of log-spaced points");
  bo_common.attach(bode);

  // --- controller ---
  auto* controller = app.add_subcommand(
      "controller", "run the angle-based assistance law over a two-leg gait "
                    "trace, emit torque CSV");
  CommonFlags co_common;
  std::string co_input;
  bool co_synth = false;
  double co_alpha = 0.04, co_period = 0.001, co_kappa = 10.0, co_shift = 0.25;
  double co_duration = 4.0, co_phase = 0.5;
  std::optional<double> co_cap;
  controller->add_option("--input", co_input,
                         "gait CSV with q_r_rad,q_l_rad columns");
  controller->add_flag("--synthetic", co_synth,
                       "use the built-in two-leg waveform instead of a file");
  controller->add_option("--alpha", co_alpha, "smoothing factor (0,1)");
  controller->add_option("--sample-period", co_period,
                         "controller sample period, s");
  controller->add_option("--kappa", co_kappa, "torque gain, N*m");
  controller->add_option("--shift", co_shift, "time shift, s");
  controller->add_option("--duration", co_duration,
                         "synthetic trace duration, s");
  controller->add_option("--phase-offset", co_phase,
                         "synthetic inter-leg phase offset, cycles");
  controller->add_option("--torque-cap", co_cap, "optional |torque| cap, N*m");
  co_common.attach(controller);

  // --- trace ---
  auto* trace = app.add_subcommand(
      "trace", "time-domain trace of one scenario (locked|free|backdrive) as "
               "CSV");
  CommonFlags tr_common;
  std::string tr_scenario;
  double tr_rg = 0.0, tr_n = 0.0;
  std::size_t tr_cycles = 3;
  trace->add_option("--scenario", tr_scenario, "locked|free|backdrive")
      ->required();
  trace->add_option("--rg", tr_rg, "motor gap radius, m")->required();
  trace->add_option("--n", tr_n, "gear ratio")->required();
  trace->add_option("--cycles", tr_cycles, "gait cycles (backdrive only)");
  tr_common.attach(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (evaluate->parsed()) {
    ConfigResolver{ev_common, evaluate}.finish();
    const exoopt::RunConfig& cfg = ev_common.cfg;
    exoopt::DesignEvaluator evaluator(cfg.optimizer_config());
    const exoopt::Requirements req = exoopt::requirements_for_age(
        ev_age, req_overrides(ev_rt, ev_rs, ev_rb, ev_rd));
    const exoopt::ConstraintReport report =
        evaluator.evaluate(ev_rg, ev_n, req);
    json doc;
    doc["command"] = "evaluate";
    doc["config"] = cfg.to_json();
    doc["design"] = {{"gap_radius_m", ev_rg}, {"gear_ratio", ev_n}};
    doc["motor"] = exoopt::scale_motor(ev_rg);
    doc["requirements"] = req;
    doc["report"] = report;
    ev_common.out.write(dump_json(doc));
    return kExitOk;
  }

  if (optimize->parsed()) {
    ConfigResolver{op_common, optimize}.finish();
    const exoopt::RunConfig& cfg = op_common.cfg;
    if (op_age.has_value() == !op_ages.empty()) {
      throw UsageError("need exactly one of --age or --ages");
    }
    exoopt::DesignEvaluator evaluator(cfg.optimizer_config());
    const exoopt::RequirementOverrides overrides =
        req_overrides(op_rt, op_rs, op_rb, op_rd);

    std::vector<double> ages;
    if (op_age) {
      ages.push_back(*op_age);
    } else {
      ages = parse_age_range(op_ages);
    }

    std::vector<exoopt::OptimizationResult> results(ages.size());
    if (op_method == "bisect") {
      for (std::size_t i = 0; i < ages.size(); ++i) {
        results[i] = evaluator.optimize(
            exoopt::requirements_for_age(ages[i], overrides));
      }
    } else if (op_method == "grid") {
      std::size_t cells_r = 0, cells_n = 0;
      char x = 0;
      std::istringstream ss(op_grid);
      if (!(ss >> cells_r >> x >> cells_n) || x != 'x' || cells_r < 2 ||
          cells_n < 2 || !ss.eof()) {
        throw UsageError("malformed --grid-cells '" + op_grid +
                         "', expected RxN");
      }
      for (std::size_t i = 0; i < ages.size(); ++i) {
        results[i] = evaluator.brute_force(
            exoopt::requirements_for_age(ages[i], overrides), cells_r,
            cells_n);
      }
    } else {
      throw UsageError("unknown --method '" + op_method + "'");
    }

    json doc;
    doc["command"] = "optimize";
    doc["config"] = cfg.to_json();
    doc["method"] = op_method;
    doc["results"] = results;
    op_common.out.write(dump_json(doc));

    std::cerr << "age   r_g[m]    n       mass[kg]  active\n";
    bool any_feasible = false;
    for (const auto& r : results) {
      char line[128];
      if (r.feasible) {
        any_feasible = true;
        std::string active;
        for (const auto& label : r.active_constraints) {
          if (!active.empty()) active += "+";
          active += label;
        }
        std::snprintf(line, sizeof line, "%-5g %-9.4f %-7.2f %-9.3f %s\n",
                      r.age, r.gap_radius, r.gear_ratio, r.actuator_mass,
                      active.c_str());
      } else {
        std::snprintf(line, sizeof line, "%-5g %s\n", r.age,
                      r.message.c_str());
      }
      std::cerr << line;
    }
    return any_feasible ? kExitOk : kExitInfeasible;
  }

  if (grid->parsed()) {
    ConfigResolver{gr_common, grid}.finish();
    const exoopt::RunConfig& cfg = gr_common.cfg;
    exoopt::DesignEvaluator evaluator(cfg.optimizer_config());
    const exoopt::GridResult result = evaluator.constraint_grid(
        exoopt::parse_grid_metric(gr_metric), parse_axis(gr_rg),
        parse_axis(gr_n));
    std::vector<std::string> comments = csv_config_comments(cfg, "grid");
    if (gr_age) comments.push_back("age: " + std::to_string(*gr_age));
    std::ostringstream out;
    write_csv(out, result, comments);
    gr_common.out.write(out.str());
    return kExitOk;
  }

  if (bode->parsed()) {
    ConfigResolver{bo_common, bode}.finish();
    const exoopt::RunConfig& cfg = bo_common.cfg;
    const exoopt::MotorParams motor = exoopt::scale_motor(bo_rg);
    const exoopt::DrivetrainConfig drive = cfg.drivetrain(bo_n);
    exoopt::ControlGains gains;
    gains.kp = cfg.kp;
    const exoopt::RationalTF tf =
        exoopt::closed_loop_torque_tf(motor, drive, gains);
    const exoopt::FrequencyResponse fr =
        exoopt::frequency_response(tf, bo_flo, bo_fhi, bo_points);

    std::vector<std::string> comments = csv_config_comments(cfg, "bode");
    comments.push_back(
        "natural_frequency_hz: " +
        std::to_string(exoopt::natural_frequency(motor, drive, gains) /
                       6.283185307179586));
    std::ostringstream out;
    write_csv(out, fr, comments);
    bo_common.out.write(out.str());
    try {
      std::cerr << "bandwidth_neg3db_hz = " << exoopt::bandwidth_neg3db(tf)
                << "\n";
    } catch (const exoopt::NotFoundError& e) {
      std::cerr << "bandwidth_neg3db_hz = none (" << e.what() << ")\n";
    }
    return kExitOk;
  }

  if (controller->parsed()) {
    ConfigResolver{co_common, controller}.finish();
    const exoopt::RunConfig& cfg = co_common.cfg;
    if (co_input.empty() == !co_synth) {
      throw UsageError("need exactly one of --input or --synthetic");
    }
    exoopt::ControllerConfig ctrl;
    ctrl.alpha = co_alpha;
    ctrl.sample_period = co_period;
    ctrl.gain = co_kappa;
    ctrl.time_shift = co_shift;
    if (co_cap) ctrl.torque_cap = *co_cap;

    exoopt::GaitTrace gait;
    if (co_synth) {
      gait = exoopt::two_leg_synthetic(cfg.gait_freq_hz, co_duration,
                                       co_period, co_phase);
    } else {
      gait = exoopt::load_trace(co_input);
    }
    const exoopt::ControllerTrace result = exoopt::run_controller(gait, ctrl);

    std::vector<std::string> comments = csv_config_comments(cfg, "controller");
    comments.push_back("alpha: " + std::to_string(co_alpha));
    comments.push_back("sample_period_s: " + std::to_string(co_period));
    comments.push_back("kappa_nm: " + std::to_string(co_kappa));
    comments.push_back("time_shift_s: " + std::to_string(co_shift));
    std::ostringstream out;
    write_csv(out, result, comments);
    co_common.out.write(out.str());
    return kExitOk;
  }

  if (trace->parsed()) {
    ConfigResolver{tr_common, trace}.finish();
    const exoopt::RunConfig& cfg = tr_common.cfg;
    const exoopt::MotorParams motor = exoopt::scale_motor(tr_rg);
    const exoopt::DrivetrainConfig drive = cfg.drivetrain(tr_n);
    exoopt::SimOptions opts;
    opts.dt = cfg.dt;
    opts.isa = cfg.isa();
    exoopt::SimTrace result;
    if (tr_scenario == "locked") {
      result = exoopt::locked_output_trace(motor, drive, cfg.supply_voltage,
                                           opts);
    } else if (tr_scenario == "free") {
      result =
          exoopt::free_output_trace(motor, drive, cfg.supply_voltage, opts);
    } else if (tr_scenario == "backdrive") {
      const exoopt::GaitInput gait(
          exoopt::knee_waveform(cfg.gait_freq_hz, cfg.gait_amplitude));
      result = exoopt::backdrive_trace(motor, drive, gait, tr_cycles, opts);
    } else {
      throw UsageError("unknown scenario '" + tr_scenario + "'");
    }
    std::ostringstream out;
    write_csv(out, result, csv_config_comments(cfg, "trace " + tr_scenario));
    tr_common.out.write(out.str());
    return kExitOk;
  }

  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const exoopt::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
