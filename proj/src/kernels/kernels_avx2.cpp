// AVX2 variants. This translation unit is compiled with -mavx2; callers must
// gate on cpu_supports_avx2() before dispatching here.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstdint>
#include <limits>

#include "sba/kernels.hpp"

namespace sba::kernels {
namespace {

std::uint64_t hsum_epi64(__m256i v) {
  __m128i lo = _mm256_castsi256_si128(v);
  __m128i hi = _mm256_extracti128_si256(v, 1);
  __m128i s = _mm_add_epi64(lo, hi);
  return static_cast<std::uint64_t>(_mm_extract_epi64(s, 0)) +
         static_cast<std::uint64_t>(_mm_extract_epi64(s, 1));
}

std::uint64_t sum_u32_avx2(const std::uint32_t* v, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc = zero;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i));
    acc = _mm256_add_epi64(acc, _mm256_unpacklo_epi32(x, zero));
    acc = _mm256_add_epi64(acc, _mm256_unpackhi_epi32(x, zero));
  }
  std::uint64_t total = hsum_epi64(acc);
  for (; i < n; ++i) total += v[i];
  return total;
}

std::uint64_t sumsq_u32_avx2(const std::uint32_t* v, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i));
    __m256i odd = _mm256_srli_epi64(x, 32);
    acc = _mm256_add_epi64(acc, _mm256_mul_epu32(x, x));
    acc = _mm256_add_epi64(acc, _mm256_mul_epu32(odd, odd));
  }
  std::uint64_t total = hsum_epi64(acc);
  for (; i < n; ++i) total += static_cast<std::uint64_t>(v[i]) * v[i];
  return total;
}

std::uint32_t hmin_epu32(__m256i v) {
  __m128i m = _mm_min_epu32(_mm256_castsi256_si128(v),
                            _mm256_extracti128_si256(v, 1));
  m = _mm_min_epu32(m, _mm_shuffle_epi32(m, _MM_SHUFFLE(1, 0, 3, 2)));
  m = _mm_min_epu32(m, _mm_shuffle_epi32(m, _MM_SHUFFLE(2, 3, 0, 1)));
  return static_cast<std::uint32_t>(_mm_cvtsi128_si32(m));
}

std::uint32_t hmax_epu32(__m256i v) {
  __m128i m = _mm_max_epu32(_mm256_castsi256_si128(v),
                            _mm256_extracti128_si256(v, 1));
  m = _mm_max_epu32(m, _mm_shuffle_epi32(m, _MM_SHUFFLE(1, 0, 3, 2)));
  m = _mm_max_epu32(m, _mm_shuffle_epi32(m, _MM_SHUFFLE(2, 3, 0, 1)));
  return static_cast<std::uint32_t>(_mm_cvtsi128_si32(m));
}

std::uint32_t min_u32_avx2(const std::uint32_t* v, std::size_t n) {
  std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
  std::size_t i = 0;
  if (n >= 8) {
    __m256i acc = _mm256_set1_epi32(-1);  // all-ones == UINT32_MAX lanes
    for (; i + 8 <= n; i += 8) {
      __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i));
      acc = _mm256_min_epu32(acc, x);
    }
    m = hmin_epu32(acc);
  }
  for (; i < n; ++i) m = v[i] < m ? v[i] : m;
  return m;
}

std::uint32_t max_u32_avx2(const std::uint32_t* v, std::size_t n) {
  std::uint32_t m = 0;
  std::size_t i = 0;
  if (n >= 8) {
    __m256i acc = _mm256_setzero_si256();
    for (; i + 8 <= n; i += 8) {
      __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i));
      acc = _mm256_max_epu32(acc, x);
    }
    m = hmax_epu32(acc);
  }
  for (; i < n; ++i) m = v[i] > m ? v[i] : m;
  return m;
}

std::size_t count_eq_u8_avx2(const std::uint8_t* v, std::size_t n,
                             std::uint8_t key) {
  const __m256i needle = _mm256_set1_epi8(static_cast<char>(key));
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i));
    std::uint32_t mask =
        static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(x, needle)));
    count += static_cast<std::size_t>(__builtin_popcount(mask));
  }
  for (; i < n; ++i) count += (v[i] == key) ? 1 : 0;
  return count;
}

}  // namespace

const Backend& avx2_backend() {
  static const Backend backend{
      "avx2",        sum_u32_avx2, sumsq_u32_avx2,
      min_u32_avx2,  max_u32_avx2, count_eq_u8_avx2,
  };
  return backend;
}

}  // namespace sba::kernels

#endif  // x86-64
