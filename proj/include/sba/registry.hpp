#pragma once

// The Network Repository Function: registration, heartbeat, discovery,
// deregistration, and subscribe/notify on status change. Request/response
// semantics mirror HTTP methods (PUT register, PATCH heartbeat, GET discover,
// DELETE deregister, POST subscribe); the simulation transports these as
// in-memory messages and records their serialized sizes.

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sba/model.hpp"

namespace sba {

/// Fixed per-message envelope overhead added to every serialized body, so
/// responses with identical bodies have identical sizes on the wire.
inline constexpr std::size_t kSbiHeaderBytes = 64;

enum class ResponseCode { Created, Ok, NoContent, NotFound, Conflict, BadRequest };

std::string_view to_label(ResponseCode code);

struct RegistryResponse {
  ResponseCode code = ResponseCode::Ok;
  std::optional<NfProfile> body;
  std::size_t size_estimate = kSbiHeaderBytes;
};

/// Heartbeat payload: a partial profile update. The status field is always
/// present (a heartbeat asserts liveness even when nothing changed).
struct ProfilePatch {
  NfStatus status = NfStatus::Registered;
  std::optional<int> load;
};

std::size_t serialized_size(const NfProfile& profile);
std::size_t serialized_size(const ProfilePatch& patch);

enum class RegistryMethod { Put, Patch, Get, Delete, Post };

std::string_view to_label(RegistryMethod method);

/// An in-memory registry message. PUT carries a full profile, PATCH a
/// partial update, GET/DELETE no body; size_estimate is the serialized body
/// plus the fixed envelope, which is what the capture tap records.
struct RegistryRequest {
  RegistryMethod method = RegistryMethod::Get;
  std::string target;  // instance id, or a discovery query like "nf-type=BSF"
  std::optional<NfProfile> profile_body;  // PUT only
  std::optional<ProfilePatch> patch_body;  // PATCH only
  double issued_at_s = 0.0;
  std::size_t size_estimate = kSbiHeaderBytes;
};

RegistryRequest make_register_request(const NfProfile& profile, double now);
RegistryRequest make_heartbeat_request(const std::string& instance_id,
                                       const ProfilePatch& patch, double now);
RegistryRequest make_discover_request(const NfType& type, double now);
RegistryRequest make_deregister_request(const std::string& instance_id,
                                        double now);

/// Empty when the method/body pairing invariants hold.
std::vector<std::string> validate_request(const RegistryRequest& request);

struct SubscriptionFilter {
  std::optional<NfType> nf_type;    // match any type when absent
  std::optional<NfStatus> to_status;  // match any target status when absent
};

struct StatusSubscription {
  std::string subscription_id;
  std::string consumer;
  SubscriptionFilter filter;
  std::string notify_target;
};

struct StatusNotification {
  std::string subscription_id;
  std::string notify_target;
  std::string instance_id;
  NfType nf_type;
  std::optional<NfStatus> from;  // absent for an initial registration
  NfStatus to;
  std::string signal;  // NF_REGISTERED / NF_SUSPENDED / NF_DEREGISTERED
  double at_s = 0.0;
};

struct StatusTransition {
  std::string instance_id;
  std::optional<NfStatus> from;
  NfStatus to;
  double at_s = 0.0;
};

/// One logical state machine; every public operation takes the registry
/// mutex, so callers on any thread observe fully applied transitions only.
/// The notification sink runs under that mutex and must not reenter the
/// registry.
class NrfRegistry {
 public:
  using NotificationSink = std::function<void(const StatusNotification&)>;

  NrfRegistry() = default;
  explicit NrfRegistry(NotificationSink sink) : sink_(std::move(sink)) {}

  void set_notification_sink(NotificationSink sink);

  /// PUT semantics: stores the profile with status REGISTERED. Returns
  /// CREATED for a new (or previously deregistered) instance, OK when an
  /// existing registration was replaced, BAD_REQUEST when the profile fails
  /// its invariants (registry unchanged).
  RegistryResponse register_nf(const NfProfile& profile, double now);

  /// PATCH semantics. NO_CONTENT with an empty body when nothing stored
  /// changed, OK with the full updated profile when a field changed, and
  /// NOT_FOUND for unknown or deregistered instances (the NF must
  /// re-register). A heartbeat on a SUSPENDED instance restores REGISTERED.
  /// Patches asserting a non-REGISTERED status are rejected as BAD_REQUEST.
  RegistryResponse heartbeat(const std::string& instance_id,
                             const ProfilePatch& patch, double now);

  /// Applies the missed-heartbeat policy: REGISTERED instances silent for
  /// more than 3x their heartbeat interval become SUSPENDED; SUSPENDED
  /// instances silent for more than 6x become DEREGISTERED. Returns the
  /// transitions applied, in instance_id order.
  std::vector<std::pair<std::string, NfStatus>> expire_stale(double now);

  /// All REGISTERED profiles of the given type, ordered by instance_id.
  std::vector<NfProfile> discover(const NfType& type) const;

  /// POST semantics. CREATED on success, CONFLICT when the subscription_id
  /// is already taken.
  RegistryResponse subscribe(const StatusSubscription& subscription);

  /// DELETE semantics. NO_CONTENT on success, NOT_FOUND for unknown ids.
  RegistryResponse unsubscribe(const std::string& subscription_id);

  /// DELETE semantics. The profile is retained as a tombstone for audit;
  /// deregistering twice returns NOT_FOUND.
  RegistryResponse deregister(const std::string& instance_id, double now);

  std::optional<NfProfile> find(const std::string& instance_id) const;
  std::vector<StatusTransition> audit_log() const;
  std::optional<double> deregistered_at(const std::string& instance_id) const;

  /// Debug endpoint payload: instances, subscriptions, and the audit log.
  nlohmann::json debug_dump() const;

 private:
  struct Entry {
    NfProfile profile;
    double last_heartbeat_s = 0.0;
  };

  void record_transition(const Entry& entry, std::optional<NfStatus> from,
                         NfStatus to, double now);

  mutable std::mutex mutex_;
  std::map<std::string, Entry> instances_;
  std::map<std::string, StatusSubscription> subscriptions_;
  std::vector<StatusTransition> audit_;
  NotificationSink sink_;
};

}  // namespace sba
