#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace exoopt::sim {

// Instruction set used by the batched integration kernels.  `automatic`
// resolves to the widest set the CPU supports; the EXOOPT_SIMD environment
// variable ("scalar", "avx2", "neon") overrides detection.
enum class Isa { automatic, scalar, avx2, neon };

bool isa_available(Isa isa);
Isa resolve_isa(Isa requested);  // throws std::invalid_argument if unavailable
const char* isa_name(Isa isa);

// Batched jobs carry one entry per design point (lane), structure-of-arrays.
// All coefficient precomputation happens scalar in the planners, so a job run
// on any ISA performs the identical per-lane rounding sequence; lanes never
// interact.  `steps` holds integral step counts stored as doubles (compared
// against the loop counter inside the kernels).

struct LockedBatchJob {
  std::vector<double> inv_inertia;  // 1/J_m
  std::vector<double> damping;      // b_m
  std::vector<double> k_t, k_b;
  std::vector<double> inv_resistance;
  std::vector<double> max_current;
  std::vector<double> spring;    // k_c / n^2, motor-side coupling stiffness
  std::vector<double> tau_gain;  // k_c / n, coupling torque per motor radian
  std::vector<double> voltage;
  std::vector<double> dt;
  std::vector<double> steps;

  std::vector<double> peak_tau;     // out: max |tau_a| over the trajectory
  std::vector<double> final_angle;  // out
  std::vector<double> final_speed;  // out

  std::size_t lanes() const { return dt.size(); }
  void resize_outputs();
};

struct FreeBatchJob {
  std::vector<double> inv_inertia;
  std::vector<double> damping;
  std::vector<double> k_t, k_b;
  std::vector<double> inv_resistance;
  std::vector<double> max_current;
  std::vector<double> voltage;
  std::vector<double> dt;
  std::vector<double> steps;

  std::vector<double> peak_speed;   // out: motor-side rad/s
  std::vector<double> final_speed;  // out

  std::size_t lanes() const { return dt.size(); }
  void resize_outputs();
};

struct BackdriveBatchJob {
  // Linear model  dw/dt = a_w*w + a_t*theta + a_h*theta_h(t).
  std::vector<double> coef_speed;   // a_w = -(b_m + k_t*k_b/R)/J_m
  std::vector<double> coef_angle;   // a_t = -k_c/(n^2 J_m)
  std::vector<double> coef_input;   // a_h =  k_c/(n J_m)
  std::vector<double> tau_gain;     // k_c/n
  std::vector<double> neg_kc;       // -k_c   (tau_a = tau_gain*theta - k_c*theta_h)
  std::vector<double> steps;        // total steps per lane
  std::vector<double> window_lo;    // first measured sample index
  std::vector<double> window_hi;    // one past last measured sample index
  double dt = 0.0;                  // shared: the input table is sampled at dt/2
  std::vector<double> input_half;   // theta_h at t = j*dt/2, j = 0..2*max_steps

  std::vector<double> sum_sq;       // out: sum of tau_a^2 over measured samples
  std::vector<double> peak_tau;     // out: max |tau_a| over measured samples
  std::vector<double> final_angle;  // out
  std::vector<double> final_speed;  // out

  std::size_t lanes() const { return steps.size(); }
  void resize_outputs();
};

// Run a job on the chosen ISA.  Lane results are identical across ISAs.
void run_locked_batch(LockedBatchJob& job, Isa isa = Isa::automatic);
void run_free_batch(FreeBatchJob& job, Isa isa = Isa::automatic);
void run_backdrive_batch(BackdriveBatchJob& job, Isa isa = Isa::automatic);

}  // namespace exoopt::sim
