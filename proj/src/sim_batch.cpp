#include "exoopt/sim_batch.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "sim_kernels_decl.hpp"

namespace exoopt::sim {

namespace {

bool cpu_has_avx2() {
#if defined(EXOOPT_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool cpu_has_neon() {
#if defined(EXOOPT_HAVE_NEON)
  return true;  // baseline on aarch64
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("EXOOPT_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && cpu_has_avx2()) return Isa::avx2;
    if (v == "neon" && cpu_has_neon()) return Isa::neon;
    return Isa::scalar;  // unknown or unavailable request falls back
  }
  if (cpu_has_avx2()) return Isa::avx2;
  if (cpu_has_neon()) return Isa::neon;
  return Isa::scalar;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::automatic:
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
    case Isa::neon:
      return cpu_has_neon();
  }
  return false;
}

Isa resolve_isa(Isa requested) {
  if (requested == Isa::automatic) {
    static const Isa detected = detect();
    return detected;
  }
  if (!isa_available(requested)) {
    throw std::invalid_argument(std::string("instruction set ") +
                                isa_name(requested) +
                                " not available on this CPU");
  }
  return requested;
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::automatic:
      return "auto";
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "?";
}

void LockedBatchJob::resize_outputs() {
  peak_tau.assign(lanes(), 0.0);
  final_angle.assign(lanes(), 0.0);
  final_speed.assign(lanes(), 0.0);
}

void FreeBatchJob::resize_outputs() {
  peak_speed.assign(lanes(), 0.0);
  final_speed.assign(lanes(), 0.0);
}

void BackdriveBatchJob::resize_outputs() {
  sum_sq.assign(lanes(), 0.0);
  peak_tau.assign(lanes(), 0.0);
  final_angle.assign(lanes(), 0.0);
  final_speed.assign(lanes(), 0.0);
}

void run_locked_batch(LockedBatchJob& job, Isa isa) {
  job.resize_outputs();
  if (job.lanes() == 0) return;
  switch (resolve_isa(isa)) {
#ifdef EXOOPT_HAVE_AVX2
    case Isa::avx2:
      return run_locked_batch_avx2(job);
#endif
#ifdef EXOOPT_HAVE_NEON
    case Isa::neon:
      return run_locked_batch_neon(job);
#endif
    default:
      return run_locked_batch_scalar(job);
  }
}

void run_free_batch(FreeBatchJob& job, Isa isa) {
  job.resize_outputs();
  if (job.lanes() == 0) return;
  switch (resolve_isa(isa)) {
#ifdef EXOOPT_HAVE_AVX2
    case Isa::avx2:
      return run_free_batch_avx2(job);
#endif
#ifdef EXOOPT_HAVE_NEON
    case Isa::neon:
      return run_free_batch_neon(job);
#endif
    default:
      return run_free_batch_scalar(job);
  }
}

void run_backdrive_batch(BackdriveBatchJob& job, Isa isa) {
  job.resize_outputs();
  if (job.lanes() == 0) return;
  switch (resolve_isa(isa)) {
#ifdef EXOOPT_HAVE_AVX2
    case Isa::avx2:
      return run_backdrive_batch_avx2(job);
#endif
#ifdef EXOOPT_HAVE_NEON
    case Isa::neon:
      return run_backdrive_batch_neon(job);
#endif
    default:
      return run_backdrive_batch_scalar(job);
  }
}

}  // namespace exoopt::sim
