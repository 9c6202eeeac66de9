#include "sba/nwdaf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sba::nwdaf {

namespace {

bool node_known(const Trace& trace, const std::string& name) {
  if (trace.topology && trace.topology->has_node(name)) return true;
  return std::any_of(trace.records.begin(), trace.records.end(),
                     [&](const PacketRecord& r) {
                       return r.src == name || r.dst == name;
                     });
}

std::vector<analytics::NfEvent> detect_pair_events(
    const Trace& trace, const std::string& src, const std::string& dst,
    const analytics::EventDetectionOptions& options) {
  const auto series = analytics::one_way_series(trace, src, dst);
  const auto peer = analytics::one_way_series(trace, dst, src);
  return analytics::detect_events(series, peer, options);
}

}  // namespace

// ---------------------------------------------------------------------------
// AnalyticsId

std::string AnalyticsId::label() const {
  std::string base;
  switch (kind) {
    case Kind::ProtocolCounts:
      base = "PROTOCOL_COUNTS";
      break;
    case Kind::ProtocolStats:
      base = "PROTOCOL_STATS";
      break;
    case Kind::PairThroughput:
      base = "PAIR_THROUGHPUT";
      break;
    case Kind::NfEvents:
      base = "NF_EVENTS";
      break;
    case Kind::NfLoad:
      base = "NF_LOAD";
      break;
    case Kind::Placement:
      base = "PLACEMENT";
      break;
  }
  if (parameterized()) base += "(" + a + "," + b + ")";
  return base;
}

std::optional<AnalyticsId> AnalyticsId::make(std::string_view base_label,
                                             std::string_view a,
                                             std::string_view b) {
  AnalyticsId id;
  if (base_label == "PROTOCOL_COUNTS") {
    id.kind = Kind::ProtocolCounts;
  } else if (base_label == "PROTOCOL_STATS") {
    id.kind = Kind::ProtocolStats;
  } else if (base_label == "PAIR_THROUGHPUT") {
    id.kind = Kind::PairThroughput;
  } else if (base_label == "NF_EVENTS") {
    id.kind = Kind::NfEvents;
  } else if (base_label == "NF_LOAD") {
    id.kind = Kind::NfLoad;
  } else if (base_label == "PLACEMENT") {
    id.kind = Kind::Placement;
  } else {
    return std::nullopt;
  }
  id.a = std::string(a);
  id.b = std::string(b);
  if (id.parameterized() && (id.a.empty() || id.b.empty())) return std::nullopt;
  return id;
}

// ---------------------------------------------------------------------------
// Placement

std::string_view to_label(ExchangeProfile profile) {
  switch (profile) {
    case ExchangeProfile::RegistrationThenHeartbeat:
      return "REGISTRATION_THEN_HEARTBEAT";
    case ExchangeProfile::Sustained:
      return "SUSTAINED";
    case ExchangeProfile::Bursty:
      return "BURSTY";
  }
  return "SUSTAINED";
}

std::string_view to_label(PlacementDecision decision) {
  switch (decision) {
    case PlacementDecision::Colocate:
      return "COLOCATE";
    case PlacementDecision::NoColocationRequired:
      return "NO_COLOCATION_REQUIRED";
    case PlacementDecision::InsufficientData:
      return "INSUFFICIENT_DATA";
  }
  return "INSUFFICIENT_DATA";
}

PlacementRecommendation recommend_placement(
    const std::vector<analytics::NfEvent>& events,
    const analytics::ThroughputSeries& throughput,
    const PlacementThresholds& thresholds) {
  PlacementRecommendation rec;
  rec.pair = {throughput.endpoint_a, throughput.endpoint_b};

  const double window_s = throughput.window_s();
  const std::uint64_t total = throughput.total_bytes();
  rec.mean_rate_bps = window_s > 0 ? static_cast<double>(total) / window_s : 0.0;
  std::uint64_t peak_bucket = 0;
  for (std::uint64_t b : throughput.bucket_bytes) peak_bucket = std::max(peak_bucket, b);
  rec.peak_rate_bps = static_cast<double>(peak_bucket) / throughput.bucket_width_s;

  bool has_spike = false;
  std::vector<double> heartbeat_times;
  for (const auto& e : events) {
    if (e.kind == analytics::NfEventKind::RegistrationSpike) has_spike = true;
    if (e.kind == analytics::NfEventKind::HeartbeatRequest) {
      heartbeat_times.push_back(e.timestamp_s);
    }
  }

  std::optional<double> period_s;
  if (heartbeat_times.size() >= 3) {
    try {
      period_s = analytics::estimate_period(heartbeat_times).period_s;
    } catch (const std::exception&) {
      period_s.reset();
    }
  }

  if (has_spike && period_s) {
    rec.exchange_profile = ExchangeProfile::RegistrationThenHeartbeat;
  } else if (rec.mean_rate_bps > 0 &&
             rec.peak_rate_bps >= thresholds.burst_ratio * rec.mean_rate_bps) {
    rec.exchange_profile = ExchangeProfile::Bursty;
  } else {
    rec.exchange_profile = ExchangeProfile::Sustained;
  }

  const bool window_too_short =
      period_s ? window_s < thresholds.min_window_periods * *period_s
               : window_s < thresholds.min_window_aperiodic_s;

  std::ostringstream why;
  why << "mean " << rec.mean_rate_bps << " B/s, peak " << rec.peak_rate_bps
      << " B/s over a " << window_s << " s window";
  if (period_s) why << "; periodic heartbeats every ~" << *period_s << " s";
  if (has_spike) why << " after a registration exchange";

  if (window_too_short) {
    rec.decision = PlacementDecision::InsufficientData;
    why << "; observation window too short for a decision";
  } else if (rec.mean_rate_bps >= thresholds.high_rate_bps) {
    rec.decision = PlacementDecision::Colocate;
    why << "; mean rate at or above the " << thresholds.high_rate_bps
        << " B/s co-location threshold";
  } else if (rec.exchange_profile == ExchangeProfile::Sustained &&
             rec.mean_rate_bps >= thresholds.low_rate_bps) {
    rec.decision = PlacementDecision::Colocate;
    why << "; sustained exchange above the " << thresholds.low_rate_bps
        << " B/s low-rate threshold";
  } else {
    rec.decision = PlacementDecision::NoColocationRequired;
    why << "; exchanged control traffic stays below the "
        << thresholds.low_rate_bps << " B/s low-rate threshold"
        << ", so co-location is not required";
  }
  rec.rationale = why.str();
  return rec;
}

nlohmann::json placement_json(const PlacementRecommendation& rec) {
  return nlohmann::json{
      {"pair", nlohmann::json::array({rec.pair.first, rec.pair.second})},
      {"mean_rate_bps", rec.mean_rate_bps},
      {"peak_rate_bps", rec.peak_rate_bps},
      {"exchange_profile", std::string(to_label(rec.exchange_profile))},
      {"decision", std::string(to_label(rec.decision))},
      {"rationale", rec.rationale},
  };
}

// ---------------------------------------------------------------------------
// AnalyticsInfo (frozen trace)

nlohmann::json AnalyticsReport::to_json() const {
  return nlohmann::json{{"analytics_id", analytics_id},
                        {"generated_at_s", generated_at_s},
                        {"source", source},
                        {"status", status},
                        {"payload", payload}};
}

AnalyticsReport analytics_info(const AnalyticsId& id, const Trace& trace,
                               const AnalyticsOptions& options,
                               const std::string& source) {
  AnalyticsReport report;
  report.analytics_id = id.label();
  report.generated_at_s = trace.duration_s;
  report.source = source;
  report.status = "OK";

  if (id.parameterized()) {
    for (const std::string& name : {id.a, id.b}) {
      if (!node_known(trace, name)) {
        throw NotFoundError("unknown node: " + name);
      }
    }
  }

  switch (id.kind) {
    case AnalyticsId::Kind::ProtocolCounts:
      report.payload = analytics::counts_json(analytics::packets_per_protocol(trace));
      break;
    case AnalyticsId::Kind::ProtocolStats:
      report.payload = analytics::stats_json(analytics::length_stats(trace));
      break;
    case AnalyticsId::Kind::PairThroughput:
      report.payload = analytics::throughput_json(analytics::pair_throughput(
          trace, id.a, id.b, options.bucket_width_s));
      break;
    case AnalyticsId::Kind::NfEvents:
      try {
        report.payload = analytics::events_json(
            detect_pair_events(trace, id.a, id.b, options.events));
      } catch (const analytics::InsufficientDataError& e) {
        report.status = "INSUFFICIENT_DATA";
        report.payload = nlohmann::json{{"detail", e.what()}};
      }
      break;
    case AnalyticsId::Kind::NfLoad:
      report.status = "INSUFFICIENT_DATA";
      report.payload =
          nlohmann::json{{"detail", "NF load requires a live registry source"}};
      break;
    case AnalyticsId::Kind::Placement: {
      std::vector<analytics::NfEvent> events;
      try {
        events = detect_pair_events(trace, id.a, id.b, options.events);
      } catch (const analytics::InsufficientDataError&) {
        // Placement still answers; the window rule downgrades the decision.
      }
      const auto series = analytics::pair_throughput(trace, id.a, id.b,
                                                     options.bucket_width_s);
      report.payload =
          placement_json(recommend_placement(events, series, options.placement));
      break;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// DmFilter

bool DmFilter::matches(const PacketRecord& record) const {
  if (src && record.src != *src) return false;
  if (dst && record.dst != *dst) return false;
  if (protocol && record.protocol != *protocol) return false;
  return true;
}

std::string DmFilter::key() const {
  return "src=" + (src ? *src : "*") + "|dst=" + (dst ? *dst : "*") +
         "|protocol=" + (protocol ? protocol->label() : "*");
}

// ---------------------------------------------------------------------------
// Runtime

Runtime::Runtime(SimulationConfig config, AnalyticsOptions options)
    : engine_(std::move(config)), options_(std::move(options)) {
  engine_.set_record_hook([this](const PacketRecord& record) {
    // Runs inside advance_to(), which already holds the runtime lock.
    for (auto& [id, sub] : dm_subscriptions_) {
      if (sub.filter.matches(record)) sub.pending.push_back(record);
    }
  });
}

double Runtime::now() const {
  std::lock_guard lock(mutex_);
  return engine_.now();
}

double Runtime::duration_s() const { return engine_.duration_s(); }

void Runtime::advance_to(double t) {
  std::lock_guard lock(mutex_);
  engine_.advance_to(t);
}

AnalyticsReport Runtime::analytics_info(const AnalyticsId& id) {
  std::lock_guard lock(mutex_);
  return analytics_info_locked(id);
}

AnalyticsReport Runtime::analytics_info_locked(const AnalyticsId& id) {
  if (id.kind == AnalyticsId::Kind::NfLoad) {
    AnalyticsReport report;
    report.analytics_id = id.label();
    report.generated_at_s = engine_.now();
    report.source = "live";
    report.status = "OK";
    auto loads = nlohmann::json::array();
    for (const auto& [name, type] : engine_.config().topology.nodes) {
      if (auto profile = engine_.registry().find(name);
          profile && profile->status == NfStatus::Registered) {
        loads.push_back({{"instance_id", profile->instance_id},
                         {"nf_type", profile->nf_type},
                         {"load", profile->load}});
      }
    }
    report.payload = std::move(loads);
    return report;
  }

  AnalyticsOptions options = options_;
  if (id.kind == AnalyticsId::Kind::NfEvents ||
      id.kind == AnalyticsId::Kind::Placement) {
    options.events.deregistered_at_s = engine_.registry().deregistered_at(id.a);
  }
  AnalyticsReport report =
      nwdaf::analytics_info(id, engine_.snapshot_trace(), options, "live");
  report.generated_at_s = engine_.now();
  return report;
}

AnalyticsReport Runtime::ml_model_report(std::string_view service_name) {
  AnalyticsReport report;
  report.analytics_id = std::string(service_name);
  report.status = "NOT_IMPLEMENTED";
  report.source = "live";
  report.payload = nlohmann::json{
      {"detail", std::string(service_name) +
                     " is declared in the catalog but not implemented"}};
  return report;
}

nlohmann::json Runtime::service_catalog() {
  return nlohmann::json{
      {"services",
       nlohmann::json::array(
           {{{"name", "AnalyticsSubscription"}, {"implemented", true}},
            {{"name", "AnalyticsInfo"}, {"implemented", true}},
            {{"name", "DataManagement"}, {"implemented", true}},
            {{"name", "MLModelProvision"}, {"implemented", false}},
            {{"name", "MLModelInfo"}, {"implemented", false}}})}};
}

void Runtime::schedule_delivery(const std::string& subscription_id, double at) {
  engine_.schedule(at, "sub:" + subscription_id, [this, subscription_id, at] {
    auto it = subscriptions_.find(subscription_id);
    if (it == subscriptions_.end() || !it->second.record.active) return;
    AnalyticsSub& sub = it->second;
    AnalyticsNotification notification;
    notification.subscription_id = subscription_id;
    notification.seq = sub.delivered.size() + 1;
    notification.at_s = at;
    notification.report = analytics_info_locked(sub.record.analytics);
    sub.delivered.push_back(std::move(notification));
    const double next = at + sub.record.cadence_s;
    if (next <= engine_.duration_s()) schedule_delivery(subscription_id, next);
  });
}

std::string Runtime::analytics_subscribe(
    const AnalyticsSubscriptionRecord& record) {
  std::lock_guard lock(mutex_);
  if (record.cadence_s <= 0) {
    throw std::invalid_argument("cadence_s must be > 0");
  }
  if (record.subscription_id.empty()) {
    throw std::invalid_argument("subscription_id must be non-empty");
  }
  auto [it, inserted] =
      subscriptions_.emplace(record.subscription_id, AnalyticsSub{record, {}});
  if (!inserted) {
    throw ConflictError("subscription_id already exists: " +
                        record.subscription_id);
  }
  const double first = engine_.now() + record.cadence_s;
  if (first <= engine_.duration_s()) {
    schedule_delivery(record.subscription_id, first);
  }
  return record.subscription_id;
}

void Runtime::analytics_unsubscribe(const std::string& subscription_id) {
  std::lock_guard lock(mutex_);
  auto it = subscriptions_.find(subscription_id);
  if (it == subscriptions_.end()) {
    throw NotFoundError("unknown subscription: " + subscription_id);
  }
  subscriptions_.erase(it);
}

std::vector<AnalyticsNotification> Runtime::notifications(
    const std::string& subscription_id) const {
  std::lock_guard lock(mutex_);
  auto it = subscriptions_.find(subscription_id);
  if (it == subscriptions_.end()) {
    throw NotFoundError("unknown subscription: " + subscription_id);
  }
  return it->second.delivered;
}

DmSubscribeResult Runtime::data_management_subscribe(
    const std::string& consumer, const DmFilter& filter, bool historical,
    const std::string& notify_target) {
  std::lock_guard lock(mutex_);
  const std::string index_key = consumer + "|" + filter.key();

  DmSubscribeResult result;
  auto indexed = dm_index_.find(index_key);
  if (indexed != dm_index_.end()) {
    // Same consumer and filter: update the existing subscription in place.
    DmSub& sub = dm_subscriptions_.at(indexed->second);
    sub.notify_target = notify_target;
    result.subscription_id = sub.subscription_id;
    result.updated_existing = true;
  } else {
    DmSub sub;
    sub.subscription_id = "dm-" + std::to_string(next_dm_id_++);
    sub.consumer = consumer;
    sub.filter = filter;
    sub.notify_target = notify_target;
    result.subscription_id = sub.subscription_id;
    dm_index_[index_key] = sub.subscription_id;
    dm_subscriptions_.emplace(sub.subscription_id, std::move(sub));
  }

  if (historical) {
    for (const auto& record : engine_.records_so_far()) {
      if (filter.matches(record)) result.replay.push_back(record);
    }
    std::stable_sort(result.replay.begin(), result.replay.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                       return a.timestamp_s < b.timestamp_s;
                     });
  }
  return result;
}

void Runtime::data_management_unsubscribe(const std::string& subscription_id) {
  std::lock_guard lock(mutex_);
  auto it = dm_subscriptions_.find(subscription_id);
  if (it == dm_subscriptions_.end()) {
    throw NotFoundError("unknown subscription: " + subscription_id);
  }
  dm_index_.erase(it->second.consumer + "|" + it->second.filter.key());
  dm_subscriptions_.erase(it);
}

std::vector<PacketRecord> Runtime::data_management_pending(
    const std::string& subscription_id) {
  std::lock_guard lock(mutex_);
  auto it = dm_subscriptions_.find(subscription_id);
  if (it == dm_subscriptions_.end()) {
    throw NotFoundError("unknown subscription: " + subscription_id);
  }
  std::vector<PacketRecord> pending;
  pending.swap(it->second.pending);
  return pending;
}

std::size_t Runtime::active_data_subscriptions() const {
  std::lock_guard lock(mutex_);
  return dm_subscriptions_.size();
}

Trace Runtime::snapshot_trace() const {
  std::lock_guard lock(mutex_);
  return engine_.snapshot_trace();
}

}  // namespace sba::nwdaf
