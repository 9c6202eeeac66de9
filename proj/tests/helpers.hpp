#pragma once

// Shared generators for property-style tests. Everything is seeded and
// deterministic.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "sba/model.hpp"

namespace sba::testing {

inline Protocol random_protocol(std::mt19937_64& rng) {
  static const std::vector<Protocol> known = {
      Protocol::Kind::Tcp,        Protocol::Kind::Ssl,
      Protocol::Kind::Pfcp,       Protocol::Kind::NgapSetup,
      Protocol::Kind::NgapInitial, Protocol::Kind::NgapUplink,
      Protocol::Kind::Sctp,       Protocol::Kind::Icmp,
  };
  std::uniform_int_distribution<std::size_t> pick(0, known.size());
  const std::size_t i = pick(rng);
  if (i < known.size()) return known[i];
  std::uniform_int_distribution<int> suffix(0, 9);
  return Protocol::other("X-PROTO-" + std::to_string(suffix(rng)));
}

/// Random valid trace: sorted timestamps within [0, duration], positive
/// lengths, distinct endpoints.
inline Trace random_trace(std::mt19937_64& rng, std::size_t max_records,
                          double duration_s = 100.0,
                          std::uint32_t max_length = 65535) {
  static const std::vector<std::string> nodes = {"nrf-1", "bsf-1", "amf-1",
                                                 "smf-1", "upf-1", "gnb-1"};
  std::uniform_int_distribution<std::size_t> count_dist(0, max_records);
  std::uniform_real_distribution<double> ts_dist(0.0, duration_s);
  std::uniform_int_distribution<std::uint32_t> length_dist(1, max_length);
  std::uniform_int_distribution<std::size_t> node_dist(0, nodes.size() - 1);

  Trace trace;
  trace.duration_s = duration_s;
  const std::size_t n = count_dist(rng);
  std::vector<double> times(n);
  for (double& t : times) t = ts_dist(rng);
  std::sort(times.begin(), times.end());
  for (std::size_t i = 0; i < n; ++i) {
    PacketRecord r;
    r.timestamp_s = times[i];
    r.src = nodes[node_dist(rng)];
    do {
      r.dst = nodes[node_dist(rng)];
    } while (r.dst == r.src);
    r.protocol = random_protocol(rng);
    r.length_bytes = length_dist(rng);
    trace.records.push_back(std::move(r));
  }
  return trace;
}

}  // namespace sba::testing
