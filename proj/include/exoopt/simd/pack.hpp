#pragma once

#include <cmath>
#include <cstddef>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#endif
#if defined(__aarch64__)
#include <arm_neon.h>
#endif

// Fixed-width double lanes with one shared op vocabulary.  Kernels are
// written once against this interface; pack1 is the scalar reference and the
// wide packs are drop-in lanes.  All fused ops go through explicit fma so
// every width performs the identical rounding sequence (the build disables
// implicit contraction), which is what makes the scalar/SIMD equivalence
// tests meaningful at the bit level.
namespace exoopt::simd {

struct pack1 {
  static constexpr std::size_t width = 1;
  double v;

  static pack1 broadcast(double x) { return {x}; }
  static pack1 load(const double* p) { return {*p}; }
  void store(double* p) const { *p = v; }

  friend pack1 operator+(pack1 a, pack1 b) { return {a.v + b.v}; }
  friend pack1 operator-(pack1 a, pack1 b) { return {a.v - b.v}; }
  friend pack1 operator*(pack1 a, pack1 b) { return {a.v * b.v}; }
  friend pack1 operator/(pack1 a, pack1 b) { return {a.v / b.v}; }

  static pack1 fma(pack1 a, pack1 b, pack1 c) {
    return {std::fma(a.v, b.v, c.v)};
  }
  // min/max keep the x86 semantics: second operand wins on unordered input.
  static pack1 min(pack1 a, pack1 b) { return {a.v < b.v ? a.v : b.v}; }
  static pack1 max(pack1 a, pack1 b) { return {a.v > b.v ? a.v : b.v}; }
  static pack1 abs(pack1 a) { return {std::fabs(a.v)}; }

  struct mask {
    bool m;
  };
  static mask less(pack1 a, pack1 b) { return {a.v < b.v}; }
  static mask greater_equal(pack1 a, pack1 b) { return {a.v >= b.v}; }
  static mask mask_and(mask a, mask b) { return {a.m && b.m}; }
  // Lanes where m is set take a, the rest keep b.
  static pack1 select(mask m, pack1 a, pack1 b) { return m.m ? a : b; }
};

#if defined(__AVX2__) && defined(__FMA__)

struct pack4 {
  static constexpr std::size_t width = 4;
  __m256d v;

  static pack4 broadcast(double x) { return {_mm256_set1_pd(x)}; }
  static pack4 load(const double* p) { return {_mm256_loadu_pd(p)}; }
  void store(double* p) const { _mm256_storeu_pd(p, v); }

  friend pack4 operator+(pack4 a, pack4 b) {
    return {_mm256_add_pd(a.v, b.v)};
  }
  friend pack4 operator-(pack4 a, pack4 b) {
    return {_mm256_sub_pd(a.v, b.v)};
  }
  friend pack4 operator*(pack4 a, pack4 b) {
    return {_mm256_mul_pd(a.v, b.v)};
  }
  friend pack4 operator/(pack4 a, pack4 b) {
    return {_mm256_div_pd(a.v, b.v)};
  }

  static pack4 fma(pack4 a, pack4 b, pack4 c) {
    return {_mm256_fmadd_pd(a.v, b.v, c.v)};
  }
  static pack4 min(pack4 a, pack4 b) { return {_mm256_min_pd(a.v, b.v)}; }
  static pack4 max(pack4 a, pack4 b) { return {_mm256_max_pd(a.v, b.v)}; }
  static pack4 abs(pack4 a) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    return {_mm256_andnot_pd(sign, a.v)};
  }

  struct mask {
    __m256d m;
  };
  static mask less(pack4 a, pack4 b) {
    return {_mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ)};
  }
  static mask greater_equal(pack4 a, pack4 b) {
    return {_mm256_cmp_pd(a.v, b.v, _CMP_GE_OQ)};
  }
  static mask mask_and(mask a, mask b) { return {_mm256_and_pd(a.m, b.m)}; }
  static pack4 select(mask m, pack4 a, pack4 b) {
    return {_mm256_blendv_pd(b.v, a.v, m.m)};
  }
};

#endif  // __AVX2__ && __FMA__

#if defined(__aarch64__)

struct pack2 {
  static constexpr std::size_t width = 2;
  float64x2_t v;

  static pack2 broadcast(double x) { return {vdupq_n_f64(x)}; }
  static pack2 load(const double* p) { return {vld1q_f64(p)}; }
  void store(double* p) const { vst1q_f64(p, v); }

  friend pack2 operator+(pack2 a, pack2 b) { return {vaddq_f64(a.v, b.v)}; }
  friend pack2 operator-(pack2 a, pack2 b) { return {vsubq_f64(a.v, b.v)}; }
  friend pack2 operator*(pack2 a, pack2 b) { return {vmulq_f64(a.v, b.v)}; }
  friend pack2 operator/(pack2 a, pack2 b) { return {vdivq_f64(a.v, b.v)}; }

  static pack2 fma(pack2 a, pack2 b, pack2 c) {
    return {vfmaq_f64(c.v, a.v, b.v)};
  }
  static pack2 min(pack2 a, pack2 b) {
    return select({vcltq_f64(a.v, b.v)}, a, b);
  }
  static pack2 max(pack2 a, pack2 b) {
    return select({vcgtq_f64(a.v, b.v)}, a, b);
  }
  static pack2 abs(pack2 a) { return {vabsq_f64(a.v)}; }

  struct mask {
    uint64x2_t m;
  };
  static mask less(pack2 a, pack2 b) { return {vcltq_f64(a.v, b.v)}; }
  static mask greater_equal(pack2 a, pack2 b) {
    return {vcgeq_f64(a.v, b.v)};
  }
  static mask mask_and(mask a, mask b) { return {vandq_u64(a.m, b.m)}; }
  static pack2 select(mask m, pack2 a, pack2 b) {
    return {vbslq_f64(m.m, a.v, b.v)};
  }
};

#endif  // __aarch64__

template <class P>
inline P clamp(P x, P lo, P hi) {
  return P::min(P::max(x, lo), hi);
}

}  // namespace exoopt::simd
