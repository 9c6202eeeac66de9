#include "sba/analytics.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "sba/capture.hpp"
#include "sba/kernels.hpp"

namespace sba::analytics {

namespace {

kernels::LengthSummary summarize(const std::vector<std::uint32_t>& lengths) {
  return kernels::summarize_u32(
      std::span<const std::uint32_t>(lengths.data(), lengths.size()));
}

}  // namespace

// ---------------------------------------------------------------------------
// packets_per_protocol

std::map<Protocol, std::uint64_t> packets_per_protocol(const Trace& trace) {
  std::map<Protocol, std::uint64_t> counts;
  // Encode each record's protocol as a small code once, then count per code
  // with the SIMD backend. Falls back to plain map counting when the trace
  // has more distinct protocols than fit a byte.
  std::vector<Protocol> index_to_protocol;
  std::map<Protocol, std::uint8_t> protocol_to_index;
  std::vector<std::uint8_t> codes;
  codes.reserve(trace.records.size());
  bool overflow = false;
  for (const auto& r : trace.records) {
    auto it = protocol_to_index.find(r.protocol);
    if (it == protocol_to_index.end()) {
      if (index_to_protocol.size() >= 255) {
        overflow = true;
        break;
      }
      it = protocol_to_index
               .emplace(r.protocol,
                        static_cast<std::uint8_t>(index_to_protocol.size()))
               .first;
      index_to_protocol.push_back(r.protocol);
    }
    codes.push_back(it->second);
  }

  if (overflow) {
    for (const auto& r : trace.records) ++counts[r.protocol];
    return counts;
  }

  const kernels::Backend& backend = kernels::active_backend();
  for (std::size_t code = 0; code < index_to_protocol.size(); ++code) {
    const std::uint64_t n = backend.count_eq_u8(codes.data(), codes.size(),
                                                static_cast<std::uint8_t>(code));
    counts[index_to_protocol[code]] = n;
  }
  return counts;
}

// ---------------------------------------------------------------------------
// length_stats

std::vector<ProtocolStats> length_stats(const Trace& trace) {
  std::map<Protocol, std::vector<std::uint32_t>> lengths;
  for (const auto& r : trace.records) {
    lengths[r.protocol].push_back(r.length_bytes);
  }

  std::vector<ProtocolStats> stats;
  stats.reserve(lengths.size());
  for (const auto& [protocol, values] : lengths) {
    const kernels::LengthSummary s = summarize(values);
    ProtocolStats entry;
    entry.protocol = protocol;
    entry.count = s.count;
    entry.mean_length = kernels::mean(s);
    entry.stddev_length = kernels::stddev_population(s);
    entry.min_length = s.min;
    entry.max_length = s.max;
    stats.push_back(std::move(entry));
  }
  std::sort(stats.begin(), stats.end(),
            [](const ProtocolStats& a, const ProtocolStats& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.protocol.label() < b.protocol.label();
            });
  return stats;
}

// ---------------------------------------------------------------------------
// pair_throughput

std::uint64_t ThroughputSeries::total_bytes() const {
  std::uint64_t total = 0;
  for (std::uint64_t b : bucket_bytes) total += b;
  return total;
}

ThroughputSeries pair_throughput(const Trace& trace, const std::string& a,
                                 const std::string& b, double bucket_width_s,
                                 Direction direction) {
  if (bucket_width_s <= 0) {
    throw std::invalid_argument("bucket_width_s must be > 0");
  }
  ThroughputSeries series;
  series.endpoint_a = a;
  series.endpoint_b = b;
  series.direction = direction;
  series.bucket_width_s = bucket_width_s;

  const std::size_t bucket_count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(trace.duration_s / bucket_width_s)));
  series.bucket_bytes.assign(bucket_count, 0);

  for (const auto& r : trace.records) {
    const bool forward = r.src == a && r.dst == b;
    const bool backward = r.src == b && r.dst == a;
    const bool match =
        direction == Direction::AToB ? forward : (forward || backward);
    if (!match) continue;
    auto index =
        static_cast<std::size_t>(std::floor(r.timestamp_s / bucket_width_s));
    if (index >= bucket_count) index = bucket_count - 1;  // t == duration
    series.bucket_bytes[index] += r.length_bytes;
  }
  return series;
}

// ---------------------------------------------------------------------------
// one_way_series

std::vector<SeriesPoint> one_way_series(const Trace& trace,
                                        const std::string& src,
                                        const std::string& dst) {
  std::vector<SeriesPoint> series;
  for (const auto& r : trace.records) {
    if (r.src == src && r.dst == dst) {
      series.push_back({r.timestamp_s, r.length_bytes});
    }
  }
  return series;
}

// ---------------------------------------------------------------------------
// estimate_period

PeriodEstimate estimate_period(std::span<const double> timestamps) {
  if (timestamps.size() < 3) {
    throw InsufficientDataError(
        "period estimation needs at least 3 timestamps, got " +
        std::to_string(timestamps.size()));
  }
  std::vector<double> diffs;
  diffs.reserve(timestamps.size() - 1);
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (!(timestamps[i] > timestamps[i - 1])) {
      throw std::invalid_argument("timestamps must be strictly increasing");
    }
    diffs.push_back(timestamps[i] - timestamps[i - 1]);
  }

  std::vector<double> sorted = diffs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = (n % 2 == 1)
                            ? sorted[n / 2]
                            : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;

  double sum = 0.0;
  for (double d : diffs) sum += d;
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double d : diffs) sq += (d - mean) * (d - mean);
  const double stddev = std::sqrt(sq / static_cast<double>(n));

  return PeriodEstimate{median, stddev, n};
}

// ---------------------------------------------------------------------------
// classify_sizes

SizeClasses classify_sizes(std::span<const std::uint32_t> lengths) {
  if (lengths.size() < 2) {
    throw InsufficientDataError("size classification needs at least 2 lengths");
  }
  std::vector<std::uint32_t> sorted(lengths.begin(), lengths.end());
  std::sort(sorted.begin(), sorted.end());

  SizeClasses result;
  if (sorted.front() == sorted.back()) {
    result.single_class = true;
    result.small_min = result.small_max = sorted.front();
    result.small_count = sorted.size();
    return result;
  }

  // Exhaustive scan over split positions between distinct values. Costs are
  // within-class sums of squared deviations computed from exact integer
  // prefix sums; ties resolve toward the lowest threshold.
  const std::size_t n = sorted.size();
  std::vector<std::uint64_t> prefix_sum(n + 1, 0);
  std::vector<std::uint64_t> prefix_sq(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix_sum[i + 1] = prefix_sum[i] + sorted[i];
    prefix_sq[i + 1] =
        prefix_sq[i] + static_cast<std::uint64_t>(sorted[i]) * sorted[i];
  }
  auto sse = [&](std::size_t begin, std::size_t end) {
    const auto count = static_cast<double>(end - begin);
    const auto sum = static_cast<double>(prefix_sum[end] - prefix_sum[begin]);
    const auto sq = static_cast<double>(prefix_sq[end] - prefix_sq[begin]);
    return sq - (sum * sum) / count;
  };

  double best_cost = 0.0;
  std::size_t best_split = 0;  // 0 means unset; split k = left part [0, k)
  for (std::size_t k = 1; k < n; ++k) {
    if (sorted[k] == sorted[k - 1]) continue;  // not a class boundary
    const double cost = sse(0, k) + sse(k, n);
    if (best_split == 0 || cost < best_cost) {
      best_cost = cost;
      best_split = k;
    }
  }

  result.single_class = false;
  result.small_min = sorted.front();
  result.small_max = sorted[best_split - 1];
  result.large_min = sorted[best_split];
  result.large_max = sorted.back();
  result.small_count = best_split;
  result.large_count = n - best_split;
  result.threshold =
      (static_cast<double>(result.small_max) + result.large_min) / 2.0;
  return result;
}

// ---------------------------------------------------------------------------
// detect_events

std::string_view to_label(NfEventKind kind) {
  switch (kind) {
    case NfEventKind::RegistrationSpike:
      return "REGISTRATION_SPIKE";
    case NfEventKind::HeartbeatRequest:
      return "HEARTBEAT_REQUEST";
    case NfEventKind::HeartbeatAck:
      return "HEARTBEAT_ACK";
    case NfEventKind::Deregistration:
      return "DEREGISTRATION";
  }
  return "HEARTBEAT_REQUEST";
}

namespace {

struct DirectionAnalysis {
  double spike_threshold = 0.0;
  std::vector<std::size_t> spikes;      // indices into the series
  std::vector<std::size_t> candidates;  // heartbeat candidates, time order
};

// Learns steady-state statistics and the size classes of one direction, then
// assigns every packet of the full series to spike / heartbeat-candidate.
// `want_large` selects the class carrying the periodic signal: requests on
// the forward direction, plain acks on the reverse one.
std::optional<DirectionAnalysis> analyze_direction(
    std::span<const SeriesPoint> series, const EventDetectionOptions& options,
    bool want_large) {
  if (series.size() < 10) return std::nullopt;

  const double first = series.front().timestamp_s;
  const double last = series.back().timestamp_s;
  const double cutoff = first + options.steady_state_fraction * (last - first);

  std::vector<std::uint32_t> steady_lengths;
  for (const auto& p : series) {
    if (p.timestamp_s > cutoff) steady_lengths.push_back(p.length_bytes);
  }
  if (steady_lengths.size() < 2) return std::nullopt;

  const kernels::LengthSummary summary = kernels::summarize_u32(
      std::span<const std::uint32_t>(steady_lengths.data(), steady_lengths.size()));
  DirectionAnalysis analysis;
  analysis.spike_threshold = kernels::mean(summary) +
                             options.spike_sigma *
                                 kernels::stddev_population(summary);

  const SizeClasses classes = classify_sizes(steady_lengths);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& p = series[i];
    if (static_cast<double>(p.length_bytes) > analysis.spike_threshold) {
      analysis.spikes.push_back(i);
      continue;
    }
    const bool in_wanted_class =
        classes.single_class ||
        (want_large ? classes.is_large(p.length_bytes)
                    : !classes.is_large(p.length_bytes));
    if (in_wanted_class) analysis.candidates.push_back(i);
  }
  return analysis;
}

// Candidates become events only when their cadence is convincingly periodic.
void emit_periodic(std::span<const SeriesPoint> series,
                   const std::vector<std::size_t>& candidates,
                   const EventDetectionOptions& options, NfEventKind kind,
                   std::vector<NfEvent>& out) {
  if (candidates.size() < 3) return;
  std::vector<double> times;
  times.reserve(candidates.size());
  for (std::size_t i : candidates) times.push_back(series[i].timestamp_s);
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) return;  // co-timed packets: not a cadence
  }
  const PeriodEstimate estimate = estimate_period(times);
  if (estimate.period_s <= 0) return;
  const double cv = estimate.stddev_s / estimate.period_s;
  if (cv >= options.max_period_cv) return;

  const double confidence =
      std::clamp(1.0 - cv / options.max_period_cv, 0.0, 1.0);
  for (std::size_t i : candidates) {
    out.push_back(NfEvent{kind, series[i].timestamp_s, series[i].length_bytes,
                          confidence});
  }
}

}  // namespace

std::vector<NfEvent> detect_events(std::span<const SeriesPoint> series,
                                   std::span<const SeriesPoint> peer_series,
                                   const EventDetectionOptions& options) {
  if (series.size() < 10) {
    throw InsufficientDataError(
        "event detection needs at least 10 packets in the series, got " +
        std::to_string(series.size()));
  }

  std::vector<NfEvent> events;

  auto forward = analyze_direction(series, options, /*want_large=*/true);
  if (!forward) {
    throw InsufficientDataError(
        "steady-state window holds too few packets for event detection");
  }
  if (!forward->spikes.empty()) {
    const std::size_t first_spike = forward->spikes.front();
    const double confidence = 1.0 / static_cast<double>(forward->spikes.size());
    events.push_back(NfEvent{NfEventKind::RegistrationSpike,
                             series[first_spike].timestamp_s,
                             series[first_spike].length_bytes, confidence});
  }
  emit_periodic(series, forward->candidates, options,
                NfEventKind::HeartbeatRequest, events);

  if (auto reverse = analyze_direction(peer_series, options, /*want_large=*/false)) {
    emit_periodic(peer_series, reverse->candidates, options,
                  NfEventKind::HeartbeatAck, events);
  }

  if (options.deregistered_at_s) {
    // The final exchange before (or at) the audit-marked time.
    const double at = *options.deregistered_at_s;
    const SeriesPoint* final_packet = nullptr;
    for (const auto& p : series) {
      if (p.timestamp_s <= at) final_packet = &p;
    }
    events.push_back(NfEvent{NfEventKind::Deregistration,
                             final_packet ? final_packet->timestamp_s : at,
                             final_packet ? final_packet->length_bytes : 0,
                             1.0});
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const NfEvent& a, const NfEvent& b) {
                     return a.timestamp_s < b.timestamp_s;
                   });
  return events;
}

// ---------------------------------------------------------------------------
// JSON views

nlohmann::json counts_json(const std::map<Protocol, std::uint64_t>& counts) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [protocol, count] : counts) j[protocol.label()] = count;
  return j;
}

nlohmann::json stats_json(const std::vector<ProtocolStats>& stats) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : stats) {
    j.push_back({{"protocol", s.protocol.label()},
                 {"count", s.count},
                 {"mean_length", s.mean_length},
                 {"stddev_length", s.stddev_length},
                 {"min_length", s.min_length},
                 {"max_length", s.max_length}});
  }
  return j;
}

nlohmann::json throughput_json(const ThroughputSeries& series) {
  nlohmann::json buckets = nlohmann::json::array();
  for (std::size_t i = 0; i < series.bucket_bytes.size(); ++i) {
    buckets.push_back(
        nlohmann::json::array({series.bucket_start(i), series.bucket_bytes[i]}));
  }
  return nlohmann::json{
      {"endpoint_a", series.endpoint_a},
      {"endpoint_b", series.endpoint_b},
      {"direction",
       series.direction == Direction::Bidirectional ? "BIDIRECTIONAL" : "A_TO_B"},
      {"bucket_width_s", series.bucket_width_s},
      {"buckets", std::move(buckets)},
  };
}

nlohmann::json events_json(const std::vector<NfEvent>& events) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : events) {
    j.push_back({{"kind", std::string(to_label(e.kind))},
                 {"timestamp_s", e.timestamp_s},
                 {"packet_length", e.packet_length},
                 {"confidence", e.confidence}});
  }
  return j;
}

}  // namespace sba::analytics
