#include "sba/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <string>

#include <nlohmann/json.hpp>

namespace sba {

namespace {

struct NfTypeLabel {
  NfType::Kind kind;
  std::string_view label;
};

constexpr std::array<NfTypeLabel, 12> kNfTypeLabels = {{
    {NfType::Kind::Nrf, "NRF"},
    {NfType::Kind::Bsf, "BSF"},
    {NfType::Kind::Amf, "AMF"},
    {NfType::Kind::Smf, "SMF"},
    {NfType::Kind::Upf, "UPF"},
    {NfType::Kind::Ausf, "AUSF"},
    {NfType::Kind::Udm, "UDM"},
    {NfType::Kind::Udr, "UDR"},
    {NfType::Kind::Pcf, "PCF"},
    {NfType::Kind::Nssf, "NSSF"},
    {NfType::Kind::Nwdaf, "NWDAF"},
    {NfType::Kind::Gnb, "GNB"},
}};

struct ProtocolLabel {
  Protocol::Kind kind;
  std::string_view label;
};

constexpr std::array<ProtocolLabel, 8> kProtocolLabels = {{
    {Protocol::Kind::Tcp, "TCP"},
    {Protocol::Kind::Ssl, "SSL"},
    {Protocol::Kind::Pfcp, "PFCP"},
    {Protocol::Kind::NgapSetup, "NGAP_SETUP"},
    {Protocol::Kind::NgapInitial, "NGAP_INITIAL"},
    {Protocol::Kind::NgapUplink, "NGAP_UPLINK"},
    {Protocol::Kind::Sctp, "SCTP"},
    {Protocol::Kind::Icmp, "ICMP"},
}};

std::string index_message(std::string_view rule, std::size_t index) {
  return std::string(rule) + " violated at index " + std::to_string(index);
}

}  // namespace

// ---------------------------------------------------------------------------
// NfType

NfType NfType::parse(std::string_view text) {
  for (const auto& entry : kNfTypeLabels) {
    if (entry.label == text) return NfType(entry.kind);
  }
  return other(std::string(text));
}

NfType NfType::other(std::string name) {
  for (const auto& entry : kNfTypeLabels) {
    if (entry.label == name) return NfType(entry.kind);
  }
  NfType t(Kind::Other);
  t.other_name_ = std::move(name);
  return t;
}

std::string NfType::label() const {
  if (kind_ == Kind::Other) return other_name_;
  for (const auto& entry : kNfTypeLabels) {
    if (entry.kind == kind_) return std::string(entry.label);
  }
  return other_name_;  // unreachable
}

// ---------------------------------------------------------------------------
// NfStatus

std::string_view to_label(NfStatus status) {
  switch (status) {
    case NfStatus::Registered:
      return "REGISTERED";
    case NfStatus::Suspended:
      return "SUSPENDED";
    case NfStatus::Deregistered:
      return "DEREGISTERED";
  }
  return "DEREGISTERED";
}

std::optional<NfStatus> parse_nf_status(std::string_view text) {
  if (text == "REGISTERED") return NfStatus::Registered;
  if (text == "SUSPENDED") return NfStatus::Suspended;
  if (text == "DEREGISTERED") return NfStatus::Deregistered;
  return std::nullopt;
}

bool legal_transition(NfStatus from, NfStatus to) {
  switch (from) {
    case NfStatus::Deregistered:
      return to == NfStatus::Registered;
    case NfStatus::Registered:
      return to == NfStatus::Suspended || to == NfStatus::Deregistered;
    case NfStatus::Suspended:
      return to == NfStatus::Registered || to == NfStatus::Deregistered;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Protocol

Protocol Protocol::parse(std::string_view text) {
  for (const auto& entry : kProtocolLabels) {
    if (entry.label == text) return Protocol(entry.kind);
  }
  return other(std::string(text));
}

Protocol Protocol::other(std::string name) {
  for (const auto& entry : kProtocolLabels) {
    if (entry.label == name) return Protocol(entry.kind);
  }
  Protocol p(Kind::Other);
  p.other_name_ = std::move(name);
  return p;
}

std::string Protocol::label() const {
  if (kind_ == Kind::Other) return other_name_;
  for (const auto& entry : kProtocolLabels) {
    if (entry.kind == kind_) return std::string(entry.label);
  }
  return other_name_;
}

Protocol parse_protocol(std::string_view text) { return Protocol::parse(text); }

// ---------------------------------------------------------------------------
// NfProfile

std::vector<std::string> validate_profile(const NfProfile& profile) {
  std::vector<std::string> violations;
  if (profile.instance_id.empty()) {
    violations.emplace_back("instance_id must be non-empty");
  }
  if (profile.heartbeat_interval_s <= 0) {
    violations.emplace_back("heartbeat_interval_s must be > 0");
  }
  if (profile.load < 0 || profile.load > 100) {
    violations.emplace_back("load must be in [0, 100]");
  }
  return violations;
}

// ---------------------------------------------------------------------------
// Topology

bool Topology::has_node(std::string_view name) const {
  return std::any_of(nodes.begin(), nodes.end(),
                     [&](const auto& n) { return n.first == name; });
}

std::vector<std::string> validate_topology(const Topology& topology) {
  std::vector<std::string> violations;
  for (std::size_t i = 0; i < topology.nodes.size(); ++i) {
    const auto& name = topology.nodes[i].first;
    if (name.empty()) {
      violations.push_back("node " + std::to_string(i) + " has empty name");
      continue;
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (topology.nodes[j].first == name) {
        violations.push_back("duplicate node name '" + name + "'");
        break;
      }
    }
  }
  for (std::size_t i = 0; i < topology.links.size(); ++i) {
    const auto& [a, b] = topology.links[i];
    if (a == b) {
      violations.push_back("self-link at index " + std::to_string(i));
    }
    for (const auto& end : {a, b}) {
      if (!topology.has_node(end)) {
        violations.push_back("link " + std::to_string(i) +
                             " references undeclared node '" + end + "'");
      }
    }
  }
  return violations;
}

// ---------------------------------------------------------------------------
// Trace

std::vector<std::string> validate_trace(const Trace& trace) {
  std::vector<std::string> violations;
  if (trace.duration_s < 0) {
    violations.emplace_back("duration >= 0 violated");
  }
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    if (r.timestamp_s < 0) violations.push_back(index_message("timestamp >= 0", i));
    if (r.length_bytes < 1) violations.push_back(index_message("length >= 1", i));
    if (r.src == r.dst) violations.push_back(index_message("src != dst", i));
    if (i > 0 && r.timestamp_s < trace.records[i - 1].timestamp_s) {
      violations.push_back(index_message("ordering", i));
    }
    if (r.timestamp_s > trace.duration_s) {
      violations.push_back(index_message("timestamp <= duration", i));
    }
  }
  return violations;
}

// ---------------------------------------------------------------------------
// JSON bindings

void to_json(nlohmann::json& j, const NfType& t) { j = t.label(); }

void from_json(const nlohmann::json& j, NfType& t) {
  t = NfType::parse(j.get<std::string>());
}

void to_json(nlohmann::json& j, const Protocol& p) { j = p.label(); }

void from_json(const nlohmann::json& j, Protocol& p) {
  p = Protocol::parse(j.get<std::string>());
}

void to_json(nlohmann::json& j, const NfProfile& p) {
  j = nlohmann::json{
      {"heartbeat_interval_s", p.heartbeat_interval_s},
      {"instance_id", p.instance_id},
      {"load", p.load},
      {"nf_type", p.nf_type},
      {"services", p.services},
      {"status", std::string(to_label(p.status))},
  };
  if (p.registered_at_s) j["registered_at_s"] = *p.registered_at_s;
}

void from_json(const nlohmann::json& j, NfProfile& p) {
  p = NfProfile{};
  j.at("instance_id").get_to(p.instance_id);
  j.at("nf_type").get_to(p.nf_type);
  j.at("heartbeat_interval_s").get_to(p.heartbeat_interval_s);
  if (j.contains("load")) j.at("load").get_to(p.load);
  if (j.contains("services")) j.at("services").get_to(p.services);
  if (j.contains("status")) {
    auto status = parse_nf_status(j.at("status").get<std::string>());
    p.status = status.value_or(NfStatus::Registered);
  }
  if (j.contains("registered_at_s")) {
    p.registered_at_s = j.at("registered_at_s").get<double>();
  }
}

void to_json(nlohmann::json& j, const PacketRecord& r) {
  j = nlohmann::json{{"timestamp_s", r.timestamp_s},
                     {"src", r.src},
                     {"dst", r.dst},
                     {"protocol", r.protocol},
                     {"length_bytes", r.length_bytes}};
}

void from_json(const nlohmann::json& j, PacketRecord& r) {
  r = PacketRecord{};
  j.at("timestamp_s").get_to(r.timestamp_s);
  j.at("src").get_to(r.src);
  j.at("dst").get_to(r.dst);
  j.at("protocol").get_to(r.protocol);
  j.at("length_bytes").get_to(r.length_bytes);
}

void to_json(nlohmann::json& j, const Topology& t) {
  auto nodes = nlohmann::json::array();
  for (const auto& [name, type] : t.nodes) {
    nodes.push_back({{"name", name}, {"type", type}});
  }
  auto links = nlohmann::json::array();
  for (const auto& [a, b] : t.links) {
    links.push_back(nlohmann::json::array({a, b}));
  }
  j = nlohmann::json{{"nodes", std::move(nodes)}, {"links", std::move(links)}};
}

void from_json(const nlohmann::json& j, Topology& t) {
  t = Topology{};
  for (const auto& node : j.at("nodes")) {
    t.nodes.emplace_back(node.at("name").get<std::string>(),
                         node.at("type").get<NfType>());
  }
  if (j.contains("links")) {
    for (const auto& link : j.at("links")) {
      t.links.emplace_back(link.at(0).get<std::string>(),
                           link.at(1).get<std::string>());
    }
  }
}

}  // namespace sba
