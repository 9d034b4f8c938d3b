// Batched RK4 kernels over the pack abstraction.  Included by one translation
// unit per instruction set; the including file defines EXOOPT_KERNEL_PACK and
// EXOOPT_KERNEL_SUFFIX before inclusion.
//
// Lanes advance in lockstep; a lane whose step budget is exhausted keeps its
// state frozen through the select at the end of each step, so trailing steps
// of longer-running lanes cannot disturb it.

#include "exoopt/sim_batch.hpp"
#include "exoopt/simd/pack.hpp"

#include <algorithm>
#include <cstddef>

namespace exoopt::sim {

namespace {

using P = EXOOPT_KERNEL_PACK;
constexpr std::size_t W = P::width;
using M = typename P::mask;

inline P padded_load(const std::vector<double>& a, std::size_t i,
                     std::size_t lanes) {
  if (i + W <= lanes) return P::load(a.data() + i);
  // Tail group: replicate the last real lane into the padding lanes.
  double buf[W];
  for (std::size_t k = 0; k < W; ++k)
    buf[k] = a[std::min(i + k, lanes - 1)];
  return P::load(buf);
}

inline void masked_store(std::vector<double>& a, std::size_t i,
                         std::size_t lanes, P value) {
  double buf[W];
  value.store(buf);
  for (std::size_t k = 0; k < W && i + k < lanes; ++k) a[i + k] = buf[k];
}

inline double group_max(const std::vector<double>& a, std::size_t i,
                        std::size_t lanes) {
  double m = a[i];
  for (std::size_t k = 1; k < W && i + k < lanes; ++k)
    m = std::max(m, a[i + k]);
  return m;
}

}  // namespace

void EXOOPT_KERNEL_NAME(run_locked_batch)(LockedBatchJob& job) {
  const std::size_t lanes = job.lanes();
  for (std::size_t i = 0; i < lanes; i += W) {
    const P inv_j = padded_load(job.inv_inertia, i, lanes);
    const P k_t = padded_load(job.k_t, i, lanes);
    const P inv_r = padded_load(job.inv_resistance, i, lanes);
    const P i_max = padded_load(job.max_current, i, lanes);
    const P neg_i_max = P::broadcast(0.0) - i_max;
    const P tau_gain = padded_load(job.tau_gain, i, lanes);
    const P volt = padded_load(job.voltage, i, lanes);
    const P neg_b = P::broadcast(0.0) - padded_load(job.damping, i, lanes);
    const P neg_kb = P::broadcast(0.0) - padded_load(job.k_b, i, lanes);
    const P neg_spring =
        P::broadcast(0.0) - padded_load(job.spring, i, lanes);
    const P h = padded_load(job.dt, i, lanes);
    const P half_h = h * P::broadcast(0.5);
    const P h6 = h / P::broadcast(6.0);
    const P steps = padded_load(job.steps, i, lanes);
    const double max_steps = group_max(job.steps, i, lanes);

    auto accel = [&](P theta, P omega) {
      const P demanded = P::fma(neg_kb, omega, volt) * inv_r;
      const P current = simd::clamp(demanded, neg_i_max, i_max);
      return P::fma(k_t, current,
                    P::fma(neg_b, omega, neg_spring * theta)) *
             inv_j;
    };

    P theta = P::broadcast(0.0);
    P omega = P::broadcast(0.0);
    P peak = P::broadcast(0.0);
    const P two = P::broadcast(2.0);

    for (double step = 0.0; step < max_steps; step += 1.0) {
      const M active = P::less(P::broadcast(step), steps);

      const P k1t = omega;
      const P k1w = accel(theta, omega);
      const P t2 = P::fma(half_h, k1t, theta);
      const P w2 = P::fma(half_h, k1w, omega);
      const P k2t = w2;
      const P k2w = accel(t2, w2);
      const P t3 = P::fma(half_h, k2t, theta);
      const P w3 = P::fma(half_h, k2w, omega);
      const P k3t = w3;
      const P k3w = accel(t3, w3);
      const P t4 = P::fma(h, k3t, theta);
      const P w4 = P::fma(h, k3w, omega);
      const P k4t = w4;
      const P k4w = accel(t4, w4);

      const P sum_t = (k1t + k4t) + two * (k2t + k3t);
      const P sum_w = (k1w + k4w) + two * (k2w + k3w);
      theta = P::select(active, P::fma(h6, sum_t, theta), theta);
      omega = P::select(active, P::fma(h6, sum_w, omega), omega);
      peak = P::max(peak, P::abs(tau_gain * theta));
    }

    masked_store(job.peak_tau, i, lanes, peak);
    masked_store(job.final_angle, i, lanes, theta);
    masked_store(job.final_speed, i, lanes, omega);
  }
}

void EXOOPT_KERNEL_NAME(run_free_batch)(FreeBatchJob& job) {
  const std::size_t lanes = job.lanes();
  for (std::size_t i = 0; i < lanes; i += W) {
    const P inv_j = padded_load(job.inv_inertia, i, lanes);
    const P k_t = padded_load(job.k_t, i, lanes);
    const P inv_r = padded_load(job.inv_resistance, i, lanes);
    const P i_max = padded_load(job.max_current, i, lanes);
    const P neg_i_max = P::broadcast(0.0) - i_max;
    const P volt = padded_load(job.voltage, i, lanes);
    const P neg_b = P::broadcast(0.0) - padded_load(job.damping, i, lanes);
    const P neg_kb = P::broadcast(0.0) - padded_load(job.k_b, i, lanes);
    const P h = padded_load(job.dt, i, lanes);
    const P half_h = h * P::broadcast(0.5);
    const P h6 = h / P::broadcast(6.0);
    const P steps = padded_load(job.steps, i, lanes);
    const double max_steps = group_max(job.steps, i, lanes);

    auto accel = [&](P omega) {
      const P demanded = P::fma(neg_kb, omega, volt) * inv_r;
      const P current = simd::clamp(demanded, neg_i_max, i_max);
      return P::fma(k_t, current, neg_b * omega) * inv_j;
    };

    P omega = P::broadcast(0.0);
    P peak = P::broadcast(0.0);
    const P two = P::broadcast(2.0);

    for (double step = 0.0; step < max_steps; step += 1.0) {
      const M active = P::less(P::broadcast(step), steps);
      const P k1 = accel(omega);
      const P k2 = accel(P::fma(half_h, k1, omega));
      const P k3 = accel(P::fma(half_h, k2, omega));
      const P k4 = accel(P::fma(h, k3, omega));
      const P sum = (k1 + k4) + two * (k2 + k3);
      omega = P::select(active, P::fma(h6, sum, omega), omega);
      peak = P::max(peak, P::abs(omega));
    }

    masked_store(job.peak_speed, i, lanes, peak);
    masked_store(job.final_speed, i, lanes, omega);
  }
}

void EXOOPT_KERNEL_NAME(run_backdrive_batch)(BackdriveBatchJob& job) {
  const std::size_t lanes = job.lanes();
  const double* half = job.input_half.data();
  for (std::size_t i = 0; i < lanes; i += W) {
    const P a_w = padded_load(job.coef_speed, i, lanes);
    const P a_t = padded_load(job.coef_angle, i, lanes);
    const P a_h = padded_load(job.coef_input, i, lanes);
    const P tau_gain = padded_load(job.tau_gain, i, lanes);
    const P neg_kc = padded_load(job.neg_kc, i, lanes);
    const P steps = padded_load(job.steps, i, lanes);
    const P window_lo = padded_load(job.window_lo, i, lanes);
    const P window_hi = padded_load(job.window_hi, i, lanes);
    const double max_steps = group_max(job.steps, i, lanes);

    const P h = P::broadcast(job.dt);
    const P half_h = h * P::broadcast(0.5);
    const P h6 = h / P::broadcast(6.0);
    const P two = P::broadcast(2.0);

    auto accel = [&](P theta, P omega, P input) {
      return P::fma(a_w, omega, P::fma(a_t, theta, a_h * input));
    };

    P theta = P::broadcast(0.0);
    P omega = P::broadcast(0.0);
    P peak = P::broadcast(0.0);
    P sum_sq = P::broadcast(0.0);

    for (double step = 0.0; step < max_steps; step += 1.0) {
      const std::size_t j = static_cast<std::size_t>(step);
      const M active = P::less(P::broadcast(step), steps);
      const P u0 = P::broadcast(half[2 * j]);
      const P u1 = P::broadcast(half[2 * j + 1]);
      const P u2 = P::broadcast(half[2 * j + 2]);

      const P k1t = omega;
      const P k1w = accel(theta, omega, u0);
      const P t2 = P::fma(half_h, k1t, theta);
      const P w2 = P::fma(half_h, k1w, omega);
      const P k2t = w2;
      const P k2w = accel(t2, w2, u1);
      const P t3 = P::fma(half_h, k2t, theta);
      const P w3 = P::fma(half_h, k2w, omega);
      const P k3t = w3;
      const P k3w = accel(t3, w3, u1);
      const P t4 = P::fma(h, k3t, theta);
      const P w4 = P::fma(h, k3w, omega);
      const P k4t = w4;
      const P k4w = accel(t4, w4, u2);

      const P sum_t = (k1t + k4t) + two * (k2t + k3t);
      const P sum_w = (k1w + k4w) + two * (k2w + k3w);
      theta = P::select(active, P::fma(h6, sum_t, theta), theta);
      omega = P::select(active, P::fma(h6, sum_w, omega), omega);

      // Sample index of the state just produced.
      const P sample = P::broadcast(step + 1.0);
      const M measured = P::mask_and(
          P::mask_and(P::greater_equal(sample, window_lo),
                      P::less(sample, window_hi)),
          active);
      const P tau = P::fma(tau_gain, theta, neg_kc * u2);
      peak = P::select(measured, P::max(peak, P::abs(tau)), peak);
      sum_sq = P::select(measured, P::fma(tau, tau, sum_sq), sum_sq);
    }

    masked_store(job.peak_tau, i, lanes, peak);
    masked_store(job.sum_sq, i, lanes, sum_sq);
    masked_store(job.final_angle, i, lanes, theta);
    masked_store(job.final_speed, i, lanes, omega);
  }
}

}  // namespace exoopt::sim
