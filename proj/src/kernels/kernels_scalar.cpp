#include <cstdint>
#include <limits>

#include "sba/kernels.hpp"

namespace sba::kernels {
namespace {

std::uint64_t sum_u32_scalar(const std::uint32_t* v, std::size_t n) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += v[i];
  return acc;
}

std::uint64_t sumsq_u32_scalar(const std::uint32_t* v, std::size_t n) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += static_cast<std::uint64_t>(v[i]) * v[i];
  }
  return acc;
}

std::uint32_t min_u32_scalar(const std::uint32_t* v, std::size_t n) {
  std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
  for (std::size_t i = 0; i < n; ++i) m = v[i] < m ? v[i] : m;
  return m;
}

std::uint32_t max_u32_scalar(const std::uint32_t* v, std::size_t n) {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < n; ++i) m = v[i] > m ? v[i] : m;
  return m;
}

std::size_t count_eq_u8_scalar(const std::uint8_t* v, std::size_t n,
                               std::uint8_t key) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += (v[i] == key) ? 1 : 0;
  return count;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend backend{
      "scalar",          sum_u32_scalar, sumsq_u32_scalar,
      min_u32_scalar,    max_u32_scalar, count_eq_u8_scalar,
  };
  return backend;
}

}  // namespace sba::kernels
