#pragma once

// Simulated NF behaviors driven by a deterministic discrete-event scheduler
// with a virtual clock. Registry exchanges (registration, heartbeats) ride
// the service-based interface and are recorded as TCP; CHATTY stubs emit
// periodic protocol-labeled exchanges toward a peer node.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sba/capture.hpp"
#include "sba/event_queue.hpp"
#include "sba/model.hpp"
#include "sba/registry.hpp"

namespace sba {

/// Virtual delay between a request record and its response record.
inline constexpr double kResponseLatencyS = 0.001;

/// Default heartbeat jitter when a scenario does not specify one.
inline constexpr double kDefaultJitterStddevS = 0.05;

enum class BehaviorKind { RegisterThenHeartbeat, RegisterOnly, Chatty };

struct ChattyBehavior {
  std::string peer;
  double period_s = 1.0;
  std::uint32_t size_bytes = 64;
  Protocol protocol = Protocol::Kind::Tcp;
};

struct AgentSpec {
  NfProfile profile;
  BehaviorKind behavior = BehaviorKind::RegisterThenHeartbeat;
  std::optional<ChattyBehavior> chatty;  // present iff behavior == Chatty
  double start_time_s = 0.0;
  double jitter_stddev_s = kDefaultJitterStddevS;
};

struct SimulationConfig {
  Topology topology;
  std::vector<AgentSpec> agents;
  double duration_s = 0.0;
  std::uint64_t seed = 0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError naming the offending field on the first violation.
void validate_config(const SimulationConfig& config);

/// Deterministic ±3-sigma-clamped gaussian draws; the generator is
/// self-contained so sequences are identical across standard libraries.
class JitterSource {
 public:
  JitterSource(std::uint64_t seed, double stddev_s);
  double next();

 private:
  std::mt19937_64 rng_;
  double stddev_s_;
};

/// Owns the registry, the capture tap, the event queue, and the agents.
/// Single-threaded: callers drive it with advance_to(); serve mode wraps it
/// in its own lock.
class SimEngine {
 public:
  explicit SimEngine(SimulationConfig config);

  double now() const { return queue_.now(); }
  double duration_s() const { return config_.duration_s; }
  const SimulationConfig& config() const { return config_; }
  NrfRegistry& registry() { return registry_; }
  const NrfRegistry& registry() const { return registry_; }

  /// Runs events with time <= min(t, duration).
  void advance_to(double t);

  /// Hook for externally driven virtual-time work (service notifications).
  void schedule(double t, std::string actor, std::function<void()> action);

  /// Every record captured so far, in emission order.
  const std::vector<PacketRecord>& records_so_far() const {
    return tap_.records();
  }

  /// Trace over everything captured so far; duration = current clock.
  Trace snapshot_trace() const;

  /// Runs to the configured duration and returns the finalized trace.
  Trace run_to_end();

  /// Observes every record as it is captured (data-management streaming).
  void set_record_hook(std::function<void(const PacketRecord&)> hook) {
    record_hook_ = std::move(hook);
  }

 private:
  struct AgentRuntime {
    std::string actor;  // unique per agent slot: "<instance_id>#<index>"
    std::unique_ptr<JitterSource> jitter;
  };

  void start_agent(std::size_t index);
  void do_registration(std::size_t index, bool then_heartbeat);
  void do_heartbeat(std::size_t index, double t);
  void do_chatty(std::size_t index, double t);
  void record(const TapMessage& message, double at);
  bool exchange_fits(double t) const {
    return t + kResponseLatencyS <= config_.duration_s;
  }
  double next_gap(std::size_t index, double nominal);

  SimulationConfig config_;
  std::string nrf_node_;
  NrfRegistry registry_;
  TraceTap tap_;
  EventQueue queue_;
  std::vector<AgentRuntime> agents_;
  std::function<void(const PacketRecord&)> record_hook_;
};

/// Runs the whole scenario and returns the trace: one record per message in
/// each request/response exchange, sorted by timestamp, deterministic for a
/// given seed.
Trace run_simulation(const SimulationConfig& config);

// ---------------------------------------------------------------------------
// Scenarios and config files

/// One NRF and one BSF with a 10 s heartbeat over a 138-minute window,
/// zero jitter — the reference setup the analytics suite is calibrated on.
SimulationConfig bsf_reference_scenario();

/// The full desk-scale mix: registry traffic (BSF/AMF/SMF heartbeats,
/// NWDAF registration) plus PFCP/NGAP/SCTP/SSL/ICMP stub exchanges.
SimulationConfig default_scenario();

void to_json(nlohmann::json& j, const SimulationConfig& config);
void from_json(const nlohmann::json& j, SimulationConfig& config);

/// Loads and validates a scenario file; ConfigError on any problem.
SimulationConfig load_config_file(const std::string& path);
void save_config_file(const SimulationConfig& config, const std::string& path);

}  // namespace sba
