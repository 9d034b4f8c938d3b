#define EXOOPT_KERNEL_PACK exoopt::simd::pack1
#define EXOOPT_KERNEL_NAME(f) f##_scalar
#include "sim_kernels.inl"
