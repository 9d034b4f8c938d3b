// Compiled with -mavx2 -mfma; reached only after a runtime CPU check.
#define EXOOPT_KERNEL_PACK exoopt::simd::pack4
#define EXOOPT_KERNEL_NAME(f) f##_avx2
#include "sim_kernels.inl"
