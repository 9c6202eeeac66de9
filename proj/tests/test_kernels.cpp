#include <doctest.h>

#include <limits>
#include <random>
#include <vector>

#include "sba/kernels.hpp"

using namespace sba::kernels;

namespace {

std::vector<std::uint32_t> random_u32(std::mt19937_64& rng, std::size_t n,
                                      std::uint32_t max_value) {
  std::uniform_int_distribution<std::uint32_t> dist(0, max_value);
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

void check_backends_agree(const Backend& reference, const Backend& candidate,
                          const std::vector<std::uint32_t>& values) {
  const std::uint32_t* data = values.data();
  const std::size_t n = values.size();
  CHECK(reference.sum_u32(data, n) == candidate.sum_u32(data, n));
  CHECK(reference.sumsq_u32(data, n) == candidate.sumsq_u32(data, n));
  CHECK(reference.min_u32(data, n) == candidate.min_u32(data, n));
  CHECK(reference.max_u32(data, n) == candidate.max_u32(data, n));
}

}  // namespace

TEST_CASE("scalar kernels: small known cases") {
  const std::vector<std::uint32_t> v = {3, 1, 4, 1, 5};
  const Backend& b = scalar_backend();
  CHECK(b.sum_u32(v.data(), v.size()) == 14);
  CHECK(b.sumsq_u32(v.data(), v.size()) == 9 + 1 + 16 + 1 + 25);
  CHECK(b.min_u32(v.data(), v.size()) == 1);
  CHECK(b.max_u32(v.data(), v.size()) == 5);

  CHECK(b.sum_u32(nullptr, 0) == 0);
  CHECK(b.min_u32(nullptr, 0) == std::numeric_limits<std::uint32_t>::max());
  CHECK(b.max_u32(nullptr, 0) == 0);

  const std::vector<std::uint8_t> codes = {1, 2, 1, 1, 3, 2};
  CHECK(b.count_eq_u8(codes.data(), codes.size(), 1) == 3);
  CHECK(b.count_eq_u8(codes.data(), codes.size(), 9) == 0);
}

TEST_CASE("simd backends match scalar bit-for-bit") {
  const Backend* simd = nullptr;
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_supports_avx2()) simd = &avx2_backend();
#elif defined(__aarch64__)
  simd = &neon_backend();
#endif
  if (simd == nullptr) {
    MESSAGE("no SIMD backend on this CPU; equivalence checked via dispatch only");
    return;
  }

  std::mt19937_64 rng(123);
  // Boundary sizes around the vector widths plus larger random blocks.
  std::vector<std::size_t> sizes = {0, 1, 2, 7, 8, 9, 15, 16, 17, 31, 32, 33, 63, 64, 65};
  for (int i = 0; i < 20; ++i) sizes.push_back(100 + i * 97);

  for (std::size_t n : sizes) {
    check_backends_agree(scalar_backend(), *simd,
                         random_u32(rng, n, 1 << 20));
    // Wraparound territory: sums exceed 2^64 and must agree mod 2^64.
    check_backends_agree(scalar_backend(), *simd,
                         random_u32(rng, n, std::numeric_limits<std::uint32_t>::max()));
  }

  std::uniform_int_distribution<int> key_dist(0, 255);
  for (std::size_t n : sizes) {
    std::vector<std::uint8_t> codes(n);
    for (auto& c : codes) c = static_cast<std::uint8_t>(key_dist(rng));
    for (int k = 0; k < 8; ++k) {
      const auto key = static_cast<std::uint8_t>(key_dist(rng));
      CHECK(scalar_backend().count_eq_u8(codes.data(), n, key) ==
            simd->count_eq_u8(codes.data(), n, key));
    }
  }
}

TEST_CASE("backend selection honors explicit overrides") {
  const Backend& original = active_backend();
  CHECK(set_active_backend("scalar"));
  CHECK(std::string(active_backend().name) == "scalar");
  CHECK_FALSE(set_active_backend("does-not-exist"));
  CHECK(std::string(active_backend().name) == "scalar");
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_supports_avx2()) {
    CHECK(set_active_backend("avx2"));
    CHECK(std::string(active_backend().name) == "avx2");
  }
#endif
  set_active_backend(original.name);
}

TEST_CASE("summary statistics from integral sums") {
  std::vector<std::uint32_t> values = {100, 300};
  const LengthSummary s =
      summarize_u32(std::span<const std::uint32_t>(values.data(), values.size()));
  CHECK(s.count == 2);
  CHECK(s.sum == 400);
  CHECK(s.min == 100);
  CHECK(s.max == 300);
  CHECK(mean(s) == doctest::Approx(200.0));
  CHECK(stddev_population(s) == doctest::Approx(100.0));

  const LengthSummary empty = summarize_u32({});
  CHECK(mean(empty) == 0.0);
  CHECK(stddev_population(empty) == 0.0);
}
