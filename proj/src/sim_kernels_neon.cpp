#define EXOOPT_KERNEL_PACK exoopt::simd::pack2
#define EXOOPT_KERNEL_NAME(f) f##_neon
#include "sim_kernels.inl"
