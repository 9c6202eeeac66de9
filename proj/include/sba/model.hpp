#pragma once

// Core domain types for the control-plane testbed: NF identities and
// profiles, protocol labels, packet records, traces, and topology.
// Everything here is a plain immutable value, safe to copy across threads.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sba {

// ---------------------------------------------------------------------------
// NfType

class NfType {
 public:
  enum class Kind {
    Nrf,
    Bsf,
    Amf,
    Smf,
    Upf,
    Ausf,
    Udm,
    Udr,
    Pcf,
    Nssf,
    Nwdaf,
    Gnb,
    Other,
  };

  NfType() : kind_(Kind::Other) {}
  NfType(Kind kind) : kind_(kind) {}  // NOLINT: implicit by design

  /// Total parse: known labels map to their kind, anything else to Other.
  static NfType parse(std::string_view text);

  /// Other(name); collapses to the known kind when name is a known label,
  /// so every constructible value round-trips through label()/parse().
  static NfType other(std::string name);

  Kind kind() const { return kind_; }
  std::string label() const;

  friend bool operator==(const NfType&, const NfType&) = default;
  friend auto operator<=>(const NfType&, const NfType&) = default;

 private:
  Kind kind_;
  std::string other_name_;  // set only for Kind::Other
};

// ---------------------------------------------------------------------------
// NfStatus

enum class NfStatus { Registered, Suspended, Deregistered };

std::string_view to_label(NfStatus status);
std::optional<NfStatus> parse_nf_status(std::string_view text);

/// Legal lifecycle moves:
///   DEREGISTERED -> REGISTERED   (register)
///   REGISTERED   -> SUSPENDED    (missed heartbeats)
///   SUSPENDED    -> REGISTERED   (heartbeat resumes)
///   REGISTERED   -> DEREGISTERED
///   SUSPENDED    -> DEREGISTERED
/// Everything else, including self-transitions, is illegal.
bool legal_transition(NfStatus from, NfStatus to);

// ---------------------------------------------------------------------------
// Protocol

class Protocol {
 public:
  enum class Kind {
    Tcp,
    Ssl,
    Pfcp,
    NgapSetup,
    NgapInitial,
    NgapUplink,
    Sctp,
    Icmp,
    Other,
  };

  Protocol() : kind_(Kind::Tcp) {}
  Protocol(Kind kind) : kind_(kind) {}  // NOLINT: implicit by design

  static Protocol parse(std::string_view text);
  static Protocol other(std::string name);

  Kind kind() const { return kind_; }
  std::string label() const;

  friend bool operator==(const Protocol&, const Protocol&) = default;
  friend auto operator<=>(const Protocol&, const Protocol&) = default;

 private:
  Kind kind_;
  std::string other_name_;
};

/// Total function: known labels map to their enum value, unknown labels to
/// Other(text). Never fails.
Protocol parse_protocol(std::string_view text);

// ---------------------------------------------------------------------------
// NfProfile

struct NfProfile {
  std::string instance_id;
  NfType nf_type;
  NfStatus status = NfStatus::Registered;
  int heartbeat_interval_s = 10;  // must be > 0
  int load = 0;                   // percent, in [0, 100]
  std::vector<std::string> services;
  std::optional<double> registered_at_s;

  friend bool operator==(const NfProfile&, const NfProfile&) = default;
};

/// Empty when the profile satisfies its invariants; otherwise one message
/// per violated rule, each naming the offending field.
std::vector<std::string> validate_profile(const NfProfile& profile);

// ---------------------------------------------------------------------------
// PacketRecord / Trace / Topology

struct PacketRecord {
  double timestamp_s = 0.0;  // seconds since trace start, >= 0
  std::string src;
  std::string dst;  // src != dst
  Protocol protocol;
  std::uint32_t length_bytes = 1;  // >= 1

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

struct Topology {
  std::vector<std::pair<std::string, NfType>> nodes;
  std::vector<std::pair<std::string, std::string>> links;  // unordered pairs

  bool has_node(std::string_view name) const;
  friend bool operator==(const Topology&, const Topology&) = default;
};

std::vector<std::string> validate_topology(const Topology& topology);

struct Trace {
  std::vector<PacketRecord> records;  // non-decreasing by timestamp
  double duration_s = 0.0;            // every record timestamp <= duration
  std::optional<Topology> topology;
};

/// Empty list iff all Trace invariants hold. Each violation names the
/// offending record index and the rule, e.g. "ordering violated at index 1".
std::vector<std::string> validate_trace(const Trace& trace);

// ---------------------------------------------------------------------------
// JSON bindings (canonical compact form; object keys are sorted, so
// serialized sizes are deterministic).

void to_json(nlohmann::json& j, const NfType& t);
void from_json(const nlohmann::json& j, NfType& t);
void to_json(nlohmann::json& j, const Protocol& p);
void from_json(const nlohmann::json& j, Protocol& p);
void to_json(nlohmann::json& j, const NfProfile& p);
void from_json(const nlohmann::json& j, NfProfile& p);
void to_json(nlohmann::json& j, const PacketRecord& r);
void from_json(const nlohmann::json& j, PacketRecord& r);
void to_json(nlohmann::json& j, const Topology& t);
void from_json(const nlohmann::json& j, Topology& t);

}  // namespace sba
