#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string_view>

#include "sba/kernels.hpp"

namespace sba::kernels {

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_supports_avx2() { return __builtin_cpu_supports("avx2") != 0; }
#endif

namespace {

const Backend* pick_default() {
  if (const char* env = std::getenv("SBA_KERNELS")) {
    std::string_view wanted(env);
    if (wanted == "scalar") return &scalar_backend();
#if defined(__x86_64__) || defined(_M_X64)
    if (wanted == "avx2" && cpu_supports_avx2()) return &avx2_backend();
#endif
#if defined(__aarch64__)
    if (wanted == "neon") return &neon_backend();
#endif
    // Unknown or unsupported request: fall through to auto-detection.
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_supports_avx2()) return &avx2_backend();
#endif
#if defined(__aarch64__)
  return &neon_backend();
#endif
  return &scalar_backend();
}

std::atomic<const Backend*>& active_slot() {
  static std::atomic<const Backend*> slot{pick_default()};
  return slot;
}

}  // namespace

const Backend& active_backend() { return *active_slot().load(); }

bool set_active_backend(std::string_view name) {
  if (name == "scalar") {
    active_slot().store(&scalar_backend());
    return true;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2" && cpu_supports_avx2()) {
    active_slot().store(&avx2_backend());
    return true;
  }
#endif
#if defined(__aarch64__)
  if (name == "neon") {
    active_slot().store(&neon_backend());
    return true;
  }
#endif
  return false;
}

LengthSummary summarize_u32(std::span<const std::uint32_t> values) {
  const Backend& b = active_backend();
  LengthSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.sum = b.sum_u32(values.data(), values.size());
  s.sum_sq = b.sumsq_u32(values.data(), values.size());
  s.min = b.min_u32(values.data(), values.size());
  s.max = b.max_u32(values.data(), values.size());
  return s;
}

double mean(const LengthSummary& s) {
  if (s.count == 0) return 0.0;
  return static_cast<double>(s.sum) / static_cast<double>(s.count);
}

double stddev_population(const LengthSummary& s) {
  if (s.count == 0) return 0.0;
  const double m = mean(s);
  const double var =
      static_cast<double>(s.sum_sq) / static_cast<double>(s.count) - m * m;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

}  // namespace sba::kernels
