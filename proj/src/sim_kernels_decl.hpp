#pragma once

#include "exoopt/sim_batch.hpp"

// Per-ISA kernel entry points.  Each lives in its own translation unit so it
// can be compiled with the matching target flags.
namespace exoopt::sim {

void run_locked_batch_scalar(LockedBatchJob&);
void run_free_batch_scalar(FreeBatchJob&);
void run_backdrive_batch_scalar(BackdriveBatchJob&);

#ifdef EXOOPT_HAVE_AVX2
void run_locked_batch_avx2(LockedBatchJob&);
void run_free_batch_avx2(FreeBatchJob&);
void run_backdrive_batch_avx2(BackdriveBatchJob&);
#endif

#ifdef EXOOPT_HAVE_NEON
void run_locked_batch_neon(LockedBatchJob&);
void run_free_batch_neon(FreeBatchJob&);
void run_backdrive_batch_neon(BackdriveBatchJob&);
#endif

}  // namespace exoopt::sim
