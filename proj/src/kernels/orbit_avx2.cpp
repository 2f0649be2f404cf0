// Compiled with -mavx2 only. No FMA: every product and sum must round
// exactly like the scalar path.

#include <immintrin.h>

#include <cstring>

#include "lyap_parts.hpp"
#include "shrimplab/kernels.hpp"

namespace shrimplab::kernels {

namespace {

struct Lanes {
  __m256d p0, p1, p2;
};

template <Family F>
inline __m256d eval4(const Lanes& p, __m256d y) {
  const __m256d yy = _mm256_mul_pd(y, y);
  if constexpr (F == Family::Parabola) {
    return _mm256_sub_pd(p.p0, yy);
  } else if constexpr (F == Family::CubicPlus) {
    return _mm256_add_pd(_mm256_add_pd(p.p0, _mm256_mul_pd(p.p1, y)), _mm256_mul_pd(yy, y));
  } else if constexpr (F == Family::CubicMinus) {
    return _mm256_sub_pd(_mm256_add_pd(p.p0, _mm256_mul_pd(p.p1, y)), _mm256_mul_pd(yy, y));
  } else if constexpr (F == Family::DoubleParabola) {
    const __m256d t = _mm256_sub_pd(p.p0, yy);
    return _mm256_sub_pd(p.p1, _mm256_mul_pd(t, t));
  } else {
    const __m256d t = _mm256_sub_pd(p.p0, yy);
    return _mm256_add_pd(_mm256_sub_pd(p.p1, _mm256_mul_pd(t, t)), _mm256_mul_pd(p.p2, y));
  }
}

template <Family F>
inline __m256d deriv4(const Lanes& p, __m256d y) {
  const __m256d yy = _mm256_mul_pd(y, y);
  if constexpr (F == Family::Parabola) {
    return _mm256_mul_pd(_mm256_set1_pd(-2.0), y);
  } else if constexpr (F == Family::CubicPlus) {
    return _mm256_add_pd(p.p1, _mm256_mul_pd(_mm256_set1_pd(3.0), yy));
  } else if constexpr (F == Family::CubicMinus) {
    return _mm256_sub_pd(p.p1, _mm256_mul_pd(_mm256_set1_pd(3.0), yy));
  } else if constexpr (F == Family::DoubleParabola) {
    const __m256d t = _mm256_sub_pd(p.p0, yy);
    return _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(4.0), y), t);
  } else {
    const __m256d t = _mm256_sub_pd(p.p0, yy);
    return _mm256_add_pd(_mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(4.0), y), t), p.p2);
  }
}

inline __m256d abs4(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

template <Family F>
void run_groups(const OrbitBatch& b, std::size_t begin, std::size_t end) {
  const std::size_t tail = static_cast<std::size_t>(b.tail);
  const int total = b.transient + b.samples;
  const int first_tail = total - b.tail;
  const __m256d radius = _mm256_set1_pd(b.escape_radius);
  const __m256d floor = _mm256_set1_pd(detail::kDerivFloor);
  const __m256i exp_mask = _mm256_set1_epi64x(static_cast<long long>(detail::kExpMask));
  const __m256i half_exp = _mm256_set1_epi64x(static_cast<long long>(detail::kHalfExp));
  const __m256i bias = _mm256_set1_epi64x(1022);
  alignas(32) double ring[4];

  for (std::size_t c = begin; c < end; c += 4) {
    Lanes p{_mm256_setzero_pd(), _mm256_setzero_pd(), _mm256_setzero_pd()};
    p.p0 = _mm256_loadu_pd(b.params[0] + c);
    if constexpr (F != Family::Parabola) p.p1 = _mm256_loadu_pd(b.params[1] + c);
    if constexpr (F == Family::Shrimp3) p.p2 = _mm256_loadu_pd(b.params[2] + c);

    __m256d y = _mm256_loadu_pd(b.seed + c);
    __m256d mant = _mm256_set1_pd(0.5);
    __m256i expo = _mm256_set1_epi64x(1);
    __m256d active = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));

    for (int s = 0; s < total; ++s) {
      if (s >= b.transient) {
        __m256d d = abs4(deriv4<F>(p, y));
        d = _mm256_max_pd(d, floor);
        const __m256i bits = _mm256_castpd_si256(_mm256_mul_pd(mant, d));
        const __m256i e = _mm256_sub_epi64(
            _mm256_srli_epi64(_mm256_and_si256(bits, exp_mask), 52), bias);
        const __m256d m = _mm256_castsi256_pd(
            _mm256_or_si256(_mm256_andnot_si256(exp_mask, bits), half_exp));
        mant = _mm256_blendv_pd(mant, m, active);
        expo = _mm256_add_epi64(expo, _mm256_and_si256(e, _mm256_castpd_si256(active)));
      }
      const __m256d yn = eval4<F>(p, y);
      y = _mm256_blendv_pd(y, yn, active);
      active = _mm256_and_pd(active, _mm256_cmp_pd(abs4(yn), radius, _CMP_LE_OQ));
      if (_mm256_movemask_pd(active) == 0) break;
      if (s >= first_tail) {
        _mm256_store_pd(ring, y);
        for (std::size_t l = 0; l < 4; ++l) b.tail_out[(c + l) * tail + (s - first_tail)] = ring[l];
      }
    }

    alignas(32) double mant_out[4];
    alignas(32) std::int64_t expo_out[4];
    _mm256_store_pd(mant_out, mant);
    _mm256_store_si256(reinterpret_cast<__m256i*>(expo_out), expo);
    const int live = _mm256_movemask_pd(active);
    for (std::size_t l = 0; l < 4; ++l) {
      const bool escaped = ((live >> l) & 1) == 0;
      b.escaped[c + l] = escaped ? 1 : 0;
      if (escaped) {
        b.lyap_mantissa[c + l] = 0.0;
        b.lyap_exponent[c + l] = 0;
        std::memset(b.tail_out + (c + l) * tail, 0, tail * sizeof(double));
      } else {
        b.lyap_mantissa[c + l] = mant_out[l];
        b.lyap_exponent[c + l] = expo_out[l];
      }
    }
  }
}

}  // namespace

void orbit_avx2(const OrbitBatch& b, std::size_t begin, std::size_t end) {
  switch (b.family) {
    case Family::Parabola:
      return run_groups<Family::Parabola>(b, begin, end);
    case Family::CubicPlus:
      return run_groups<Family::CubicPlus>(b, begin, end);
    case Family::CubicMinus:
      return run_groups<Family::CubicMinus>(b, begin, end);
    case Family::DoubleParabola:
      return run_groups<Family::DoubleParabola>(b, begin, end);
    case Family::Shrimp3:
      return run_groups<Family::Shrimp3>(b, begin, end);
  }
}

}  // namespace shrimplab::kernels
