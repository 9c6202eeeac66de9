#pragma once

// NF-facing NWDAF services: AnalyticsInfo (request/response),
// AnalyticsSubscription (subscribe/notify on a virtual-time cadence),
// DataManagement (historical replay + live record streams), and the
// placement recommendation consumer logic.
//
// MLModelProvision and MLModelInfo are declared in the catalog but return a
// stable not-implemented result.

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sba/analytics.hpp"
#include "sba/model.hpp"
#include "sba/simulation.hpp"

namespace sba::nwdaf {

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Analytics catalog

struct AnalyticsId {
  enum class Kind {
    ProtocolCounts,
    ProtocolStats,
    PairThroughput,  // (a, b)
    NfEvents,        // (src, dst)
    NfLoad,
    Placement,       // (a, b)
  };

  Kind kind = Kind::ProtocolCounts;
  std::string a;
  std::string b;

  bool parameterized() const {
    return kind == Kind::PairThroughput || kind == Kind::NfEvents ||
           kind == Kind::Placement;
  }
  std::string label() const;  // e.g. "PAIR_THROUGHPUT(bsf-1,nrf-1)"

  /// Builds an id from its base label and optional parameters; nullopt for
  /// unknown labels or missing parameters.
  static std::optional<AnalyticsId> make(std::string_view base_label,
                                         std::string_view a = {},
                                         std::string_view b = {});
};

// ---------------------------------------------------------------------------
// Placement

struct PlacementThresholds {
  double low_rate_bps = 1000.0;     // below this, heartbeat-only pairs stay apart
  double high_rate_bps = 100000.0;  // above this, co-locate regardless of profile
  double burst_ratio = 10.0;        // peak/mean ratio separating BURSTY from SUSTAINED
  double min_window_periods = 10.0;
  double min_window_aperiodic_s = 60.0;
};

enum class ExchangeProfile { RegistrationThenHeartbeat, Sustained, Bursty };
enum class PlacementDecision { Colocate, NoColocationRequired, InsufficientData };

std::string_view to_label(ExchangeProfile profile);
std::string_view to_label(PlacementDecision decision);

struct PlacementRecommendation {
  std::pair<std::string, std::string> pair;
  double mean_rate_bps = 0.0;
  double peak_rate_bps = 0.0;
  ExchangeProfile exchange_profile = ExchangeProfile::Sustained;
  PlacementDecision decision = PlacementDecision::InsufficientData;
  std::string rationale;
};

/// Decides co-location from the detected event pattern and the pair's
/// throughput series. The observation window is the series span; the window
/// is insufficient when it covers fewer than min_window_periods detected
/// heartbeat periods (or min_window_aperiodic_s seconds when aperiodic).
PlacementRecommendation recommend_placement(
    const std::vector<analytics::NfEvent>& events,
    const analytics::ThroughputSeries& throughput,
    const PlacementThresholds& thresholds = {});

nlohmann::json placement_json(const PlacementRecommendation& recommendation);

// ---------------------------------------------------------------------------
// AnalyticsInfo over a frozen trace

struct AnalyticsOptions {
  analytics::EventDetectionOptions events;
  double bucket_width_s = 1.0;
  PlacementThresholds placement;
};

struct AnalyticsReport {
  std::string analytics_id;
  double generated_at_s = 0.0;
  std::string source;
  std::string status;  // OK | INSUFFICIENT_DATA | NOT_IMPLEMENTED
  nlohmann::json payload;

  nlohmann::json to_json() const;
};

/// Pure function of (id, trace): repeated identical requests on a frozen
/// trace return identical reports. Unknown nodes in a parameterized id throw
/// NotFoundError; insufficient data comes back as a result, not an error.
AnalyticsReport analytics_info(const AnalyticsId& id, const Trace& trace,
                               const AnalyticsOptions& options = {},
                               const std::string& source = "trace");

// ---------------------------------------------------------------------------
// Subscriptions and data management (live runtime)

struct AnalyticsSubscriptionRecord {
  std::string subscription_id;
  std::string consumer;
  AnalyticsId analytics;
  double cadence_s = 60.0;
  std::string notify_target;
  bool active = true;
};

struct AnalyticsNotification {
  std::string subscription_id;
  std::uint64_t seq = 0;  // 1-based, per subscription
  double at_s = 0.0;
  AnalyticsReport report;
};

struct DmFilter {
  std::optional<std::string> src;
  std::optional<std::string> dst;
  std::optional<Protocol> protocol;

  bool matches(const PacketRecord& record) const;
  std::string key() const;
};

struct DmSubscribeResult {
  std::string subscription_id;
  bool updated_existing = false;
  std::vector<PacketRecord> replay;  // historical matches, time order
};

/// Owns a SimEngine plus the NWDAF service state. All public operations are
/// serialized through one mutex; per-subscription notification order is
/// guaranteed.
class Runtime {
 public:
  explicit Runtime(SimulationConfig config, AnalyticsOptions options = {});

  double now() const;
  double duration_s() const;
  void advance_to(double t);

  const SimulationConfig& config() const { return engine_.config(); }
  NrfRegistry& registry() { return engine_.registry(); }

  AnalyticsReport analytics_info(const AnalyticsId& id);
  static AnalyticsReport ml_model_report(std::string_view service_name);
  static nlohmann::json service_catalog();

  /// Throws ConflictError on a duplicate subscription_id. Deliveries happen
  /// every cadence_s of virtual time while the subscription stays active.
  std::string analytics_subscribe(const AnalyticsSubscriptionRecord& record);
  void analytics_unsubscribe(const std::string& subscription_id);
  std::vector<AnalyticsNotification> notifications(
      const std::string& subscription_id) const;

  DmSubscribeResult data_management_subscribe(const std::string& consumer,
                                              const DmFilter& filter,
                                              bool historical,
                                              const std::string& notify_target = {});
  void data_management_unsubscribe(const std::string& subscription_id);
  /// Live matches delivered since the last drain.
  std::vector<PacketRecord> data_management_pending(
      const std::string& subscription_id);
  std::size_t active_data_subscriptions() const;

  /// Snapshot of everything captured so far (for flushing to disk).
  Trace snapshot_trace() const;

 private:
  struct AnalyticsSub {
    AnalyticsSubscriptionRecord record;
    std::vector<AnalyticsNotification> delivered;
  };
  struct DmSub {
    std::string subscription_id;
    std::string consumer;
    DmFilter filter;
    std::string notify_target;
    std::vector<PacketRecord> pending;
  };

  void schedule_delivery(const std::string& subscription_id, double at);
  AnalyticsReport analytics_info_locked(const AnalyticsId& id);

  mutable std::mutex mutex_;
  SimEngine engine_;
  AnalyticsOptions options_;
  std::map<std::string, AnalyticsSub> subscriptions_;
  std::map<std::string, DmSub> dm_subscriptions_;        // by subscription_id
  std::map<std::string, std::string> dm_index_;          // consumer|filter -> id
  std::uint64_t next_dm_id_ = 1;
};

}  // namespace sba::nwdaf
