#pragma once

// Arithmetic kernels behind the analytics hot loops (per-protocol counting,
// length statistics, byte sums). A scalar reference implementation always
// exists; AVX2 (x86-64) and NEON (aarch64) variants are selected at runtime
// and are equivalence-tested against the scalar path.
//
// All accumulation is integral, so every backend produces bit-identical
// results (sums are mod 2^64 by construction).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace sba::kernels {

struct Backend {
  const char* name;
  std::uint64_t (*sum_u32)(const std::uint32_t* v, std::size_t n);
  std::uint64_t (*sumsq_u32)(const std::uint32_t* v, std::size_t n);
  std::uint32_t (*min_u32)(const std::uint32_t* v, std::size_t n);  // UINT32_MAX on empty
  std::uint32_t (*max_u32)(const std::uint32_t* v, std::size_t n);  // 0 on empty
  std::size_t (*count_eq_u8)(const std::uint8_t* v, std::size_t n, std::uint8_t key);
};

const Backend& scalar_backend();

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_supports_avx2();
const Backend& avx2_backend();  // only valid to call when cpu_supports_avx2()
#endif

#if defined(__aarch64__)
const Backend& neon_backend();
#endif

/// The runtime-selected backend: best available for this CPU, overridable
/// with the SBA_KERNELS environment variable ("scalar", "avx2", "neon").
const Backend& active_backend();

/// Force a backend by name; returns false (and changes nothing) when the
/// name is unknown or unsupported on this CPU.
bool set_active_backend(std::string_view name);

// ---------------------------------------------------------------------------
// Convenience reductions over the active backend.

struct LengthSummary {
  std::size_t count = 0;
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;
  std::uint32_t min = 0;
  std::uint32_t max = 0;
};

LengthSummary summarize_u32(std::span<const std::uint32_t> values);

/// Population mean/stddev from a summary; both 0 for empty input.
double mean(const LengthSummary& s);
double stddev_population(const LengthSummary& s);

}  // namespace sba::kernels
