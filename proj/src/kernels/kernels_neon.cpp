// NEON variants for aarch64, where NEON is baseline and needs no runtime probe.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstdint>
#include <limits>

#include "sba/kernels.hpp"

namespace sba::kernels {
namespace {

std::uint64_t sum_u32_neon(const std::uint32_t* v, std::size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    uint32x4_t x = vld1q_u32(v + i);
    acc = vaddq_u64(acc, vpaddlq_u32(x));
  }
  std::uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) total += v[i];
  return total;
}

std::uint64_t sumsq_u32_neon(const std::uint32_t* v, std::size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    uint32x4_t x = vld1q_u32(v + i);
    acc = vaddq_u64(acc, vmull_u32(vget_low_u32(x), vget_low_u32(x)));
    acc = vaddq_u64(acc, vmull_u32(vget_high_u32(x), vget_high_u32(x)));
  }
  std::uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) total += static_cast<std::uint64_t>(v[i]) * v[i];
  return total;
}

std::uint32_t min_u32_neon(const std::uint32_t* v, std::size_t n) {
  std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
  std::size_t i = 0;
  if (n >= 4) {
    uint32x4_t acc = vdupq_n_u32(m);
    for (; i + 4 <= n; i += 4) acc = vminq_u32(acc, vld1q_u32(v + i));
    m = vminvq_u32(acc);
  }
  for (; i < n; ++i) m = v[i] < m ? v[i] : m;
  return m;
}

std::uint32_t max_u32_neon(const std::uint32_t* v, std::size_t n) {
  std::uint32_t m = 0;
  std::size_t i = 0;
  if (n >= 4) {
    uint32x4_t acc = vdupq_n_u32(0);
    for (; i + 4 <= n; i += 4) acc = vmaxq_u32(acc, vld1q_u32(v + i));
    m = vmaxvq_u32(acc);
  }
  for (; i < n; ++i) m = v[i] > m ? v[i] : m;
  return m;
}

std::size_t count_eq_u8_neon(const std::uint8_t* v, std::size_t n,
                             std::uint8_t key) {
  const uint8x16_t needle = vdupq_n_u8(key);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    uint8x16_t eq = vceqq_u8(vld1q_u8(v + i), needle);
    // matches are 0xFF; summing (x & 1) counts them
    count += vaddvq_u8(vandq_u8(eq, vdupq_n_u8(1)));
  }
  for (; i < n; ++i) count += (v[i] == key) ? 1 : 0;
  return count;
}

}  // namespace

const Backend& neon_backend() {
  static const Backend backend{
      "neon",        sum_u32_neon, sumsq_u32_neon,
      min_u32_neon,  max_u32_neon, count_eq_u8_neon,
  };
  return backend;
}

}  // namespace sba::kernels

#endif  // aarch64
