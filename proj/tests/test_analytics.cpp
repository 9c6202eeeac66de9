#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "sba/analytics.hpp"
#include "sba/simulation.hpp"

using namespace sba;
using namespace sba::analytics;

namespace {

Trace make_trace(std::vector<PacketRecord> records, double duration) {
  Trace trace;
  trace.records = std::move(records);
  trace.duration_s = duration;
  return trace;
}

/// Naive two-pass oracle for per-protocol length statistics, independent of
/// the kernel-backed implementation.
struct OracleStats {
  std::size_t count = 0;
  double mean = 0, stddev = 0;
  std::uint32_t min = 0, max = 0;
};

std::map<std::string, OracleStats> two_pass_oracle(const Trace& trace) {
  std::map<std::string, std::vector<std::uint32_t>> groups;
  for (const auto& r : trace.records) {
    groups[r.protocol.label()].push_back(r.length_bytes);
  }
  std::map<std::string, OracleStats> out;
  for (const auto& [label, values] : groups) {
    OracleStats s;
    s.count = values.size();
    double sum = 0;
    s.min = values[0];
    s.max = values[0];
    for (std::uint32_t v : values) {
      sum += v;
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0;
    for (std::uint32_t v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
    out[label] = s;
  }
  return out;
}

/// Brute-force within-class variance scan over every split of the sorted
/// values; same cost definition, independent enumeration and accumulation.
struct OracleSplit {
  bool single = false;
  double threshold = 0;
  std::size_t small_count = 0;
};

OracleSplit brute_force_classify(std::vector<std::uint32_t> values) {
  std::sort(values.begin(), values.end());
  OracleSplit result;
  if (values.front() == values.back()) {
    result.single = true;
    return result;
  }
  double best = 0;
  std::size_t best_k = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] == values[k - 1]) continue;
    double cost = 0;
    for (auto [begin, end] : {std::pair<std::size_t, std::size_t>{0, k},
                              {k, values.size()}}) {
      std::uint64_t sum = 0, sq = 0;
      for (std::size_t i = begin; i < end; ++i) {
        sum += values[i];
        sq += static_cast<std::uint64_t>(values[i]) * values[i];
      }
      const auto n = static_cast<double>(end - begin);
      cost += static_cast<double>(sq) -
              (static_cast<double>(sum) * static_cast<double>(sum)) / n;
    }
    if (best_k == 0 || cost < best) {
      best = cost;
      best_k = k;
    }
  }
  result.threshold =
      (static_cast<double>(values[best_k - 1]) + values[best_k]) / 2.0;
  result.small_count = best_k;
  return result;
}

}  // namespace

TEST_CASE("packet counts partition the trace") {
  CHECK(packets_per_protocol(make_trace({}, 0)).empty());

  const Trace trace = make_trace(
      {
          {0.0, "a", "b", Protocol::Kind::Tcp, 10},
          {1.0, "a", "b", Protocol::Kind::Tcp, 10},
          {2.0, "b", "a", Protocol::Kind::Tcp, 10},
          {3.0, "a", "b", Protocol::Kind::Pfcp, 10},
      },
      4);
  const auto counts = packets_per_protocol(trace);
  REQUIRE(counts.size() == 2);
  CHECK(counts.at(Protocol::Kind::Tcp) == 3);
  CHECK(counts.at(Protocol::Kind::Pfcp) == 1);
}

TEST_CASE("count conservation on random traces") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 40; ++i) {
    const Trace trace = testing::random_trace(rng, 500);
    const auto counts = packets_per_protocol(trace);
    std::uint64_t total = 0;
    for (const auto& [p, c] : counts) {
      CHECK(c >= 1);
      total += c;
    }
    CHECK(total == trace.records.size());
  }
}

TEST_CASE("counting survives more distinct protocols than byte codes") {
  Trace trace;
  trace.duration_s = 1000;
  for (int i = 0; i < 300; ++i) {
    trace.records.push_back({static_cast<double>(i), "a", "b",
                             Protocol::other("P-" + std::to_string(i % 260)),
                             10});
  }
  const auto counts = packets_per_protocol(trace);
  CHECK(counts.size() == 260);
  std::uint64_t total = 0;
  for (const auto& [p, c] : counts) total += c;
  CHECK(total == 300);
}

TEST_CASE("length statistics: degenerate and hand-computed cases") {
  const auto single = length_stats(
      make_trace({{0.0, "a", "b", Protocol::Kind::Tcp, 128}}, 1));
  REQUIRE(single.size() == 1);
  CHECK(single[0].mean_length == 128.0);
  CHECK(single[0].stddev_length == 0.0);
  CHECK(single[0].max_length == 128);
  CHECK(single[0].min_length == 128);

  const auto two = length_stats(
      make_trace({{0.0, "a", "b", Protocol::Kind::Tcp, 100},
                  {1.0, "a", "b", Protocol::Kind::Tcp, 300}},
                 1));
  REQUIRE(two.size() == 1);
  CHECK(two[0].mean_length == 200.0);     // hand-computed
  CHECK(two[0].stddev_length == 100.0);   // population stddev of {100, 300}
  CHECK(two[0].max_length == 300);

  CHECK(length_stats(make_trace({}, 0)).empty());
}

TEST_CASE("length statistics match the two-pass oracle") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 30; ++i) {
    const Trace trace = testing::random_trace(rng, 2000);
    const auto stats = length_stats(trace);
    const auto oracle = two_pass_oracle(trace);
    REQUIRE(stats.size() == oracle.size());
    for (const auto& s : stats) {
      const OracleStats& o = oracle.at(s.protocol.label());
      CHECK(s.count == o.count);
      CHECK(s.mean_length == doctest::Approx(o.mean).epsilon(1e-9));
      CHECK(s.stddev_length == doctest::Approx(o.stddev).epsilon(1e-9));
      CHECK(s.min_length == o.min);
      CHECK(s.max_length == o.max);
      CHECK(s.min_length <= s.mean_length);
      CHECK(s.mean_length <= s.max_length);
      CHECK(s.stddev_length >= 0.0);
    }
    // Sorted by descending count.
    for (std::size_t k = 1; k < stats.size(); ++k) {
      CHECK(stats[k - 1].count >= stats[k].count);
    }
  }
}

TEST_CASE("pair throughput buckets") {
  const Trace trace = make_trace(
      {
          {0.1, "a", "b", Protocol::Kind::Tcp, 100},
          {0.5, "b", "a", Protocol::Kind::Tcp, 100},
          {0.9, "a", "b", Protocol::Kind::Tcp, 100},
      },
      1.0);
  const auto series = pair_throughput(trace, "a", "b", 1.0);
  REQUIRE(series.bucket_bytes.size() == 1);
  CHECK(series.bucket_bytes[0] == 300);

  const auto one_way = pair_throughput(trace, "a", "b", 1.0, Direction::AToB);
  CHECK(one_way.bucket_bytes[0] == 200);

  // No matching records: all-zero buckets spanning the duration.
  const Trace quiet = make_trace(
      {{0.5, "x", "y", Protocol::Kind::Tcp, 10}}, 4.0);
  const auto zero = pair_throughput(quiet, "a", "b", 1.0);
  CHECK(zero.bucket_bytes == std::vector<std::uint64_t>{0, 0, 0, 0});

  // A record at exactly t = duration folds into the final bucket.
  const Trace edge = make_trace(
      {{4.0, "a", "b", Protocol::Kind::Tcp, 7}}, 4.0);
  const auto folded = pair_throughput(edge, "a", "b", 1.0);
  CHECK(folded.bucket_bytes.back() == 7);
  CHECK(folded.total_bytes() == 7);
}

TEST_CASE("throughput conservation over random traces and widths") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 25; ++i) {
    const Trace trace = testing::random_trace(rng, 400);
    for (double width : {0.5, 1.0, 5.0}) {
      const auto series = pair_throughput(trace, "bsf-1", "nrf-1", width);
      std::uint64_t expected = 0;
      for (const auto& r : trace.records) {
        const bool match = (r.src == "bsf-1" && r.dst == "nrf-1") ||
                           (r.src == "nrf-1" && r.dst == "bsf-1");
        if (match) expected += r.length_bytes;
      }
      CHECK(series.total_bytes() == expected);
      for (std::size_t k = 0; k < series.bucket_bytes.size(); ++k) {
        CHECK(series.bucket_start(k) == width * static_cast<double>(k));
      }
    }
  }
}

TEST_CASE("one-way series filters exactly src->dst") {
  const Trace trace = make_trace(
      {
          {0.0, "bsf-1", "nrf-1", Protocol::Kind::Tcp, 200},
          {0.5, "nrf-1", "bsf-1", Protocol::Kind::Tcp, 64},
          {1.0, "bsf-1", "nrf-1", Protocol::Kind::Tcp, 87},
          {1.5, "nrf-1", "bsf-1", Protocol::Kind::Tcp, 64},
          {2.0, "nrf-1", "bsf-1", Protocol::Kind::Tcp, 64},
      },
      2.0);
  CHECK(one_way_series(trace, "bsf-1", "nrf-1").size() == 2);
  CHECK(one_way_series(trace, "nrf-1", "bsf-1").size() == 3);
  CHECK(one_way_series(trace, "bsf-1", "bsf-1").empty());
}

TEST_CASE("period estimation: exact, median-robust, and insufficient data") {
  std::vector<double> exact;
  for (int i = 0; i <= 10; ++i) exact.push_back(10.0 * i);
  const auto estimate = estimate_period(exact);
  CHECK(estimate.period_s == 10.0);
  CHECK(estimate.stddev_s == 0.0);
  CHECK(estimate.support == 10);

  const std::vector<double> late = {0, 10, 20, 31, 40};  // one late beat
  const auto robust = estimate_period(late);
  CHECK(robust.period_s == 10.0);  // median of {10, 10, 11, 9}
  CHECK(robust.support == 4);

  CHECK_THROWS_AS(estimate_period(std::vector<double>{0, 5}),
                  InsufficientDataError);
  CHECK_THROWS_AS(estimate_period(std::vector<double>{0, 5, 5, 9}),
                  std::invalid_argument);
}

TEST_CASE("period estimation tracks jittered cadences across seeds") {
  // Mirrors the agent schedule: gaps of interval + clamped gaussian draws.
  const double interval = 10.0, sigma = 0.05;
  int pass = 0;
  const int seeds = 100;
  for (int seed = 1; seed <= seeds; ++seed) {
    JitterSource jitter(static_cast<std::uint64_t>(seed), sigma);
    std::vector<double> times;
    double t = 0;
    for (int k = 0; k < 60; ++k) {
      times.push_back(t);
      t += interval + jitter.next();
    }
    const auto estimate = estimate_period(times);
    const double bound =
        3.0 * sigma / std::sqrt(static_cast<double>(estimate.support));
    if (std::abs(estimate.period_s - interval) <= bound) ++pass;
  }
  CHECK(pass >= 95);
}

TEST_CASE("size classification: frozen examples") {
  const std::vector<std::uint32_t> two_sizes = {64, 64, 180, 180, 180};
  const auto classes = classify_sizes(two_sizes);
  CHECK_FALSE(classes.single_class);
  CHECK(classes.threshold == 122.0);  // midpoint of 64 and 180
  CHECK(classes.small_max == 64);
  CHECK(classes.large_min == 180);
  CHECK(classes.small_count == 2);
  CHECK(classes.large_count == 3);

  const auto identical = classify_sizes(std::vector<std::uint32_t>{100, 100});
  CHECK(identical.single_class);

  const auto skewed = classify_sizes(std::vector<std::uint32_t>{1, 2, 100});
  CHECK_FALSE(skewed.single_class);
  CHECK(skewed.small_max == 2);  // split {1,2} | {100}
  CHECK(skewed.large_min == 100);
  CHECK(skewed.threshold == 51.0);

  CHECK_THROWS_AS(classify_sizes(std::vector<std::uint32_t>{5}),
                  InsufficientDataError);
}

TEST_CASE("size classification equals the brute-force minimizer") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> count_dist(2, 60);
  std::uniform_int_distribution<std::uint32_t> unique_dist(1, 20);
  std::uniform_int_distribution<std::uint32_t> value_dist(1, 2000);
  for (int i = 0; i < 300; ++i) {
    const std::uint32_t unique = unique_dist(rng);
    std::vector<std::uint32_t> pool;
    for (std::uint32_t u = 0; u < unique; ++u) pool.push_back(value_dist(rng));
    std::vector<std::uint32_t> values;
    const std::size_t n = count_dist(rng);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t k = 0; k < n; ++k) values.push_back(pool[pick(rng)]);

    const auto got = classify_sizes(values);
    const auto oracle = brute_force_classify(values);
    CHECK(got.single_class == oracle.single);
    if (!oracle.single) {
      CHECK(got.threshold == oracle.threshold);
      CHECK(got.small_count == oracle.small_count);
    }
  }
}

TEST_CASE("event detection on the reference scenario") {
  const Trace trace = run_simulation(bsf_reference_scenario());
  const auto series = one_way_series(trace, "bsf-1", "nrf-1");
  const auto peer = one_way_series(trace, "nrf-1", "bsf-1");
  const auto events = detect_events(series, peer);

  std::size_t spikes = 0, requests = 0, acks = 0;
  for (const auto& e : events) {
    switch (e.kind) {
      case NfEventKind::RegistrationSpike:
        ++spikes;
        CHECK(e.timestamp_s == 0.0);
        CHECK(e.confidence == 1.0);
        break;
      case NfEventKind::HeartbeatRequest:
        ++requests;
        break;
      case NfEventKind::HeartbeatAck:
        ++acks;
        break;
      default:
        break;
    }
  }
  CHECK(spikes == 1);
  CHECK(requests == 827);
  CHECK(acks == 827);

  // Time-ordered.
  for (std::size_t i = 1; i < events.size(); ++i) {
    CHECK(events[i - 1].timestamp_s <= events[i].timestamp_s);
  }
}

TEST_CASE("constant-size periodic series: heartbeats without a spike") {
  std::vector<SeriesPoint> series;
  for (int i = 0; i < 50; ++i) series.push_back({10.0 * i, 87});
  const auto events = detect_events(series, {});
  std::size_t spikes = 0, requests = 0;
  for (const auto& e : events) {
    if (e.kind == NfEventKind::RegistrationSpike) ++spikes;
    if (e.kind == NfEventKind::HeartbeatRequest) ++requests;
  }
  CHECK(spikes == 0);
  CHECK(requests == 50);
}

TEST_CASE("aperiodic timestamps yield no heartbeat events") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> gap(0.1, 30.0);
  std::vector<SeriesPoint> series;
  double t = 0;
  for (int i = 0; i < 60; ++i) {
    series.push_back({t, 87});
    t += gap(rng);
  }
  const auto events = detect_events(series, {});
  for (const auto& e : events) {
    CHECK(e.kind != NfEventKind::HeartbeatRequest);
  }
}

TEST_CASE("event detection needs at least 10 packets") {
  std::vector<SeriesPoint> series;
  for (int i = 0; i < 9; ++i) series.push_back({1.0 * i, 87});
  CHECK_THROWS_AS(detect_events(series, {}), InsufficientDataError);
}

TEST_CASE("audit-marked deregistration becomes the final event") {
  std::vector<SeriesPoint> series;
  for (int i = 0; i < 50; ++i) series.push_back({10.0 * i, 87});
  EventDetectionOptions options;
  options.deregistered_at_s = 490.0;
  const auto events = detect_events(series, {}, options);
  REQUIRE(!events.empty());
  CHECK(events.back().kind == NfEventKind::Deregistration);
  CHECK(events.back().timestamp_s == 490.0);
}
