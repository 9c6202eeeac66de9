#include "sba/registry.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace sba {

namespace {

std::string_view signal_for(NfStatus to) {
  switch (to) {
    case NfStatus::Registered:
      return "NF_REGISTERED";
    case NfStatus::Suspended:
      return "NF_SUSPENDED";
    case NfStatus::Deregistered:
      return "NF_DEREGISTERED";
  }
  return "NF_DEREGISTERED";
}

bool filter_matches(const SubscriptionFilter& filter, const NfType& type,
                    NfStatus to) {
  if (filter.nf_type && *filter.nf_type != type) return false;
  if (filter.to_status && *filter.to_status != to) return false;
  return true;
}

nlohmann::json patch_json(const ProfilePatch& patch) {
  nlohmann::json j{{"status", std::string(to_label(patch.status))}};
  if (patch.load) j["load"] = *patch.load;
  return j;
}

RegistryResponse make_response(ResponseCode code,
                               std::optional<NfProfile> body = std::nullopt) {
  RegistryResponse response;
  response.code = code;
  response.size_estimate = kSbiHeaderBytes;
  if (body) response.size_estimate += serialized_size(*body);
  response.body = std::move(body);
  return response;
}

}  // namespace

std::string_view to_label(ResponseCode code) {
  switch (code) {
    case ResponseCode::Created:
      return "CREATED";
    case ResponseCode::Ok:
      return "OK";
    case ResponseCode::NoContent:
      return "NO_CONTENT";
    case ResponseCode::NotFound:
      return "NOT_FOUND";
    case ResponseCode::Conflict:
      return "CONFLICT";
    case ResponseCode::BadRequest:
      return "BAD_REQUEST";
  }
  return "BAD_REQUEST";
}

std::size_t serialized_size(const NfProfile& profile) {
  return nlohmann::json(profile).dump().size();
}

std::size_t serialized_size(const ProfilePatch& patch) {
  return patch_json(patch).dump().size();
}

std::string_view to_label(RegistryMethod method) {
  switch (method) {
    case RegistryMethod::Put:
      return "PUT";
    case RegistryMethod::Patch:
      return "PATCH";
    case RegistryMethod::Get:
      return "GET";
    case RegistryMethod::Delete:
      return "DELETE";
    case RegistryMethod::Post:
      return "POST";
  }
  return "GET";
}

RegistryRequest make_register_request(const NfProfile& profile, double now) {
  RegistryRequest request;
  request.method = RegistryMethod::Put;
  request.target = profile.instance_id;
  request.profile_body = profile;
  request.issued_at_s = now;
  request.size_estimate = kSbiHeaderBytes + serialized_size(profile);
  return request;
}

RegistryRequest make_heartbeat_request(const std::string& instance_id,
                                       const ProfilePatch& patch, double now) {
  RegistryRequest request;
  request.method = RegistryMethod::Patch;
  request.target = instance_id;
  request.patch_body = patch;
  request.issued_at_s = now;
  request.size_estimate = kSbiHeaderBytes + serialized_size(patch);
  return request;
}

RegistryRequest make_discover_request(const NfType& type, double now) {
  RegistryRequest request;
  request.method = RegistryMethod::Get;
  request.target = "nf-type=" + type.label();
  request.issued_at_s = now;
  return request;
}

RegistryRequest make_deregister_request(const std::string& instance_id,
                                        double now) {
  RegistryRequest request;
  request.method = RegistryMethod::Delete;
  request.target = instance_id;
  request.issued_at_s = now;
  return request;
}

std::vector<std::string> validate_request(const RegistryRequest& request) {
  std::vector<std::string> violations;
  const bool has_profile = request.profile_body.has_value();
  const bool has_patch = request.patch_body.has_value();
  switch (request.method) {
    case RegistryMethod::Put:
      if (!has_profile) violations.emplace_back("PUT requires a full profile body");
      if (has_patch) violations.emplace_back("PUT must not carry a patch body");
      break;
    case RegistryMethod::Patch:
      if (!has_patch) violations.emplace_back("PATCH requires a patch body");
      if (has_profile) violations.emplace_back("PATCH must not carry a profile body");
      break;
    case RegistryMethod::Get:
    case RegistryMethod::Delete:
      if (has_profile || has_patch) {
        violations.emplace_back(std::string(to_label(request.method)) +
                                " must not carry a body");
      }
      break;
    case RegistryMethod::Post:
      break;
  }
  if (request.target.empty()) violations.emplace_back("target must be non-empty");
  return violations;
}

void NrfRegistry::set_notification_sink(NotificationSink sink) {
  std::lock_guard lock(mutex_);
  sink_ = std::move(sink);
}

void NrfRegistry::record_transition(const Entry& entry,
                                    std::optional<NfStatus> from, NfStatus to,
                                    double now) {
  audit_.push_back({entry.profile.instance_id, from, to, now});
  if (subscriptions_.empty()) return;
  for (const auto& [id, sub] : subscriptions_) {
    if (!filter_matches(sub.filter, entry.profile.nf_type, to)) continue;
    if (sink_) {
      sink_(StatusNotification{id, sub.notify_target,
                               entry.profile.instance_id,
                               entry.profile.nf_type, from, to,
                               std::string(signal_for(to)), now});
    }
  }
}

RegistryResponse NrfRegistry::register_nf(const NfProfile& profile,
                                          double now) {
  std::lock_guard lock(mutex_);
  if (!validate_profile(profile).empty()) {
    return make_response(ResponseCode::BadRequest);
  }

  auto it = instances_.find(profile.instance_id);
  const bool replacing =
      it != instances_.end() && it->second.profile.status != NfStatus::Deregistered;
  std::optional<NfStatus> from;
  if (it != instances_.end()) from = it->second.profile.status;

  Entry entry;
  entry.profile = profile;
  entry.profile.status = NfStatus::Registered;
  entry.profile.registered_at_s = now;
  entry.last_heartbeat_s = now;
  instances_[profile.instance_id] = entry;

  if (from != NfStatus::Registered) {
    record_transition(entry, from, NfStatus::Registered, now);
  }
  return make_response(replacing ? ResponseCode::Ok : ResponseCode::Created,
                       entry.profile);
}

RegistryResponse NrfRegistry::heartbeat(const std::string& instance_id,
                                        const ProfilePatch& patch, double now) {
  std::lock_guard lock(mutex_);
  auto it = instances_.find(instance_id);
  if (it == instances_.end() ||
      it->second.profile.status == NfStatus::Deregistered) {
    return make_response(ResponseCode::NotFound);
  }
  if (patch.status != NfStatus::Registered) {
    // A heartbeat always asserts liveness; anything else is not a heartbeat.
    return make_response(ResponseCode::BadRequest);
  }

  Entry& entry = it->second;
  entry.last_heartbeat_s = now;

  bool changed = false;
  if (entry.profile.status != NfStatus::Registered) {
    const NfStatus from = entry.profile.status;
    entry.profile.status = NfStatus::Registered;
    record_transition(entry, from, NfStatus::Registered, now);
    changed = true;
  }
  if (patch.load && *patch.load != entry.profile.load) {
    entry.profile.load = *patch.load;
    changed = true;
  }

  if (!changed) return make_response(ResponseCode::NoContent);
  return make_response(ResponseCode::Ok, entry.profile);
}

std::vector<std::pair<std::string, NfStatus>> NrfRegistry::expire_stale(
    double now) {
  std::lock_guard lock(mutex_);
  std::vector<std::pair<std::string, NfStatus>> transitions;
  for (auto& [id, entry] : instances_) {
    const double silent = now - entry.last_heartbeat_s;
    const double interval = entry.profile.heartbeat_interval_s;
    if (entry.profile.status == NfStatus::Registered && silent > 3 * interval) {
      entry.profile.status = NfStatus::Suspended;
      record_transition(entry, NfStatus::Registered, NfStatus::Suspended, now);
      transitions.emplace_back(id, NfStatus::Suspended);
    }
    if (entry.profile.status == NfStatus::Suspended && silent > 6 * interval) {
      entry.profile.status = NfStatus::Deregistered;
      record_transition(entry, NfStatus::Suspended, NfStatus::Deregistered,
                        now);
      transitions.emplace_back(id, NfStatus::Deregistered);
    }
  }
  return transitions;
}

std::vector<NfProfile> NrfRegistry::discover(const NfType& type) const {
  std::lock_guard lock(mutex_);
  std::vector<NfProfile> result;
  for (const auto& [id, entry] : instances_) {
    if (entry.profile.status == NfStatus::Registered &&
        entry.profile.nf_type == type) {
      result.push_back(entry.profile);
    }
  }
  return result;  // instances_ is id-ordered
}

RegistryResponse NrfRegistry::subscribe(const StatusSubscription& subscription) {
  std::lock_guard lock(mutex_);
  auto [it, inserted] =
      subscriptions_.emplace(subscription.subscription_id, subscription);
  if (!inserted) return make_response(ResponseCode::Conflict);
  return make_response(ResponseCode::Created);
}

RegistryResponse NrfRegistry::unsubscribe(const std::string& subscription_id) {
  std::lock_guard lock(mutex_);
  if (subscriptions_.erase(subscription_id) == 0) {
    return make_response(ResponseCode::NotFound);
  }
  return make_response(ResponseCode::NoContent);
}

RegistryResponse NrfRegistry::deregister(const std::string& instance_id,
                                         double now) {
  std::lock_guard lock(mutex_);
  auto it = instances_.find(instance_id);
  if (it == instances_.end() ||
      it->second.profile.status == NfStatus::Deregistered) {
    return make_response(ResponseCode::NotFound);
  }
  const NfStatus from = it->second.profile.status;
  it->second.profile.status = NfStatus::Deregistered;
  record_transition(it->second, from, NfStatus::Deregistered, now);
  return make_response(ResponseCode::NoContent);
}

std::optional<NfProfile> NrfRegistry::find(const std::string& instance_id) const {
  std::lock_guard lock(mutex_);
  auto it = instances_.find(instance_id);
  if (it == instances_.end()) return std::nullopt;
  return it->second.profile;
}

std::vector<StatusTransition> NrfRegistry::audit_log() const {
  std::lock_guard lock(mutex_);
  return audit_;
}

std::optional<double> NrfRegistry::deregistered_at(
    const std::string& instance_id) const {
  std::lock_guard lock(mutex_);
  for (auto it = audit_.rbegin(); it != audit_.rend(); ++it) {
    if (it->instance_id == instance_id && it->to == NfStatus::Deregistered) {
      return it->at_s;
    }
  }
  return std::nullopt;
}

nlohmann::json NrfRegistry::debug_dump() const {
  std::lock_guard lock(mutex_);
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& [id, entry] : instances_) {
    nlohmann::json item = entry.profile;
    item["last_heartbeat_s"] = entry.last_heartbeat_s;
    instances.push_back(std::move(item));
  }
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& [id, sub] : subscriptions_) {
    nlohmann::json filter;
    if (sub.filter.nf_type) filter["nf_type"] = *sub.filter.nf_type;
    if (sub.filter.to_status) {
      filter["to_status"] = std::string(to_label(*sub.filter.to_status));
    }
    subs.push_back({{"subscription_id", id},
                    {"consumer", sub.consumer},
                    {"filter", std::move(filter)},
                    {"notify_target", sub.notify_target}});
  }
  nlohmann::json audit = nlohmann::json::array();
  for (const auto& t : audit_) {
    nlohmann::json item{{"instance_id", t.instance_id},
                        {"to", std::string(to_label(t.to))},
                        {"at_s", t.at_s}};
    if (t.from) item["from"] = std::string(to_label(*t.from));
    audit.push_back(std::move(item));
  }
  return nlohmann::json{{"instances", std::move(instances)},
                        {"subscriptions", std::move(subs)},
                        {"audit", std::move(audit)}};
}

}  // namespace sba
