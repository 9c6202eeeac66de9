#pragma once

// The NWDAF analytics engine: per-protocol packet counts and length
// statistics, pairwise throughput series, one-way series, heartbeat
// periodicity estimation, two-size clustering, and NF-event detection.
// Every operation is a pure function of its trace input.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sba/model.hpp"

namespace sba::analytics {

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Protocol distribution (counts and length statistics)

/// Counts partition the trace: values sum to the record count, and protocols
/// absent from the trace are absent from the map.
std::map<Protocol, std::uint64_t> packets_per_protocol(const Trace& trace);

struct ProtocolStats {
  Protocol protocol;
  std::uint64_t count = 0;
  double mean_length = 0.0;
  double stddev_length = 0.0;  // population definition (divide by N)
  std::uint32_t min_length = 0;
  std::uint32_t max_length = 0;
};

/// One entry per protocol present, sorted by descending count (ties by
/// label, ascending).
std::vector<ProtocolStats> length_stats(const Trace& trace);

// ---------------------------------------------------------------------------
// Throughput

enum class Direction { Bidirectional, AToB };

struct ThroughputSeries {
  std::string endpoint_a;
  std::string endpoint_b;
  Direction direction = Direction::Bidirectional;
  double bucket_width_s = 1.0;
  /// bucket i covers [i * width, (i+1) * width); gap-free from t = 0.
  std::vector<std::uint64_t> bucket_bytes;

  double bucket_start(std::size_t i) const { return bucket_width_s * static_cast<double>(i); }
  std::uint64_t total_bytes() const;
  double window_s() const {
    return bucket_width_s * static_cast<double>(bucket_bytes.size());
  }
};

/// Sums matching record bytes into consecutive buckets spanning the trace
/// duration; records at exactly t = duration fold into the final bucket.
ThroughputSeries pair_throughput(const Trace& trace, const std::string& a,
                                 const std::string& b, double bucket_width_s,
                                 Direction direction = Direction::Bidirectional);

// ---------------------------------------------------------------------------
// One-way series

struct SeriesPoint {
  double timestamp_s = 0.0;
  std::uint32_t length_bytes = 0;
};

/// Time-ordered (timestamp, length) pairs for records with exactly this
/// src and dst.
std::vector<SeriesPoint> one_way_series(const Trace& trace,
                                        const std::string& src,
                                        const std::string& dst);

// ---------------------------------------------------------------------------
// Periodicity

struct PeriodEstimate {
  double period_s = 0.0;  // median of consecutive differences
  double stddev_s = 0.0;  // population stddev of the differences
  std::size_t support = 0;  // number of differences used
};

/// Requires >= 3 strictly increasing timestamps; otherwise throws
/// InsufficientDataError (or std::invalid_argument when not increasing).
PeriodEstimate estimate_period(std::span<const double> timestamps);

// ---------------------------------------------------------------------------
// Two-size clustering

struct SizeClasses {
  bool single_class = false;  // all lengths identical; threshold undefined
  double threshold = 0.0;     // midpoint between the class boundary values
  std::uint32_t small_min = 0, small_max = 0;
  std::uint32_t large_min = 0, large_max = 0;
  std::size_t small_count = 0, large_count = 0;

  bool is_large(std::uint32_t length) const {
    return !single_class && static_cast<double>(length) > threshold;
  }
};

/// Two-cluster split of 1-D lengths minimizing within-class variance over
/// all threshold positions (exhaustive scan over sorted unique values;
/// ties resolved toward the lowest threshold). Requires >= 2 values.
SizeClasses classify_sizes(std::span<const std::uint32_t> lengths);

// ---------------------------------------------------------------------------
// NF events

enum class NfEventKind {
  RegistrationSpike,
  HeartbeatRequest,
  HeartbeatAck,
  Deregistration,
};

std::string_view to_label(NfEventKind kind);

struct NfEvent {
  NfEventKind kind = NfEventKind::HeartbeatRequest;
  double timestamp_s = 0.0;
  std::uint32_t packet_length = 0;
  double confidence = 0.0;  // in [0, 1]
};

struct EventDetectionOptions {
  /// Steady state starts after this fraction of the series time span.
  double steady_state_fraction = 0.05;
  /// A packet is a registration spike when its length exceeds
  /// steady mean + spike_sigma * steady stddev.
  double spike_sigma = 3.0;
  /// Heartbeats are emitted only when stddev/period of the candidate
  /// timestamps stays below this value.
  double max_period_cv = 0.1;
  /// When the registry audit marked a deregistration (simulation mode),
  /// its virtual time; absent in ingest mode.
  std::optional<double> deregistered_at_s;
};

/// Analyzes the NF->NRF direction (`series`) for the registration spike and
/// heartbeat requests, and the reverse direction (`peer_series`) for
/// heartbeat acknowledgements. Size classes are learned on steady-state
/// lengths and then assigned across the full series. Events come back
/// time-ordered. Throws InsufficientDataError when `series` has fewer than
/// 10 packets.
std::vector<NfEvent> detect_events(std::span<const SeriesPoint> series,
                                   std::span<const SeriesPoint> peer_series,
                                   const EventDetectionOptions& options = {});

// ---------------------------------------------------------------------------
// JSON views (report payloads)

nlohmann::json counts_json(const std::map<Protocol, std::uint64_t>& counts);
nlohmann::json stats_json(const std::vector<ProtocolStats>& stats);
nlohmann::json throughput_json(const ThroughputSeries& series);
nlohmann::json events_json(const std::vector<NfEvent>& events);

}  // namespace sba::analytics
