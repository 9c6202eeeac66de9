#include "sba/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

namespace sba {

namespace {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string field(std::size_t agent_index, std::string_view name) {
  return "agents[" + std::to_string(agent_index) + "]." + std::string(name);
}

}  // namespace

// ---------------------------------------------------------------------------
// Validation

void validate_config(const SimulationConfig& config) {
  if (config.duration_s <= 0) {
    throw ConfigError("duration_s must be > 0");
  }
  auto topology_violations = validate_topology(config.topology);
  if (!topology_violations.empty()) {
    throw ConfigError("topology invalid: " + topology_violations.front());
  }
  std::size_t nrf_count = 0;
  for (const auto& [name, type] : config.topology.nodes) {
    if (type == NfType(NfType::Kind::Nrf)) ++nrf_count;
  }
  if (nrf_count != 1) {
    throw ConfigError("topology must declare exactly one NRF node, found " +
                      std::to_string(nrf_count));
  }

  std::set<std::string> registering_ids;
  for (std::size_t i = 0; i < config.agents.size(); ++i) {
    const AgentSpec& agent = config.agents[i];
    auto profile_violations = validate_profile(agent.profile);
    if (!profile_violations.empty()) {
      throw ConfigError(field(i, "profile: " + profile_violations.front()));
    }
    if (!config.topology.has_node(agent.profile.instance_id)) {
      throw ConfigError(field(i, "profile.instance_id '" +
                                     agent.profile.instance_id +
                                     "' is not a topology node"));
    }
    if (agent.start_time_s < 0) {
      throw ConfigError(field(i, "start_time_s must be >= 0"));
    }
    if (agent.jitter_stddev_s < 0) {
      throw ConfigError(field(i, "jitter_stddev_s must be >= 0"));
    }
    if (agent.jitter_stddev_s >= agent.profile.heartbeat_interval_s / 2.0) {
      throw ConfigError(
          field(i, "jitter_stddev_s must be < heartbeat_interval_s / 2"));
    }
    if (agent.behavior == BehaviorKind::Chatty) {
      if (!agent.chatty) {
        throw ConfigError(field(i, "behavior CHATTY requires peer settings"));
      }
      if (!config.topology.has_node(agent.chatty->peer)) {
        throw ConfigError(field(i, "behavior.peer '" + agent.chatty->peer +
                                       "' is not a topology node"));
      }
      if (agent.chatty->peer == agent.profile.instance_id) {
        throw ConfigError(field(i, "behavior.peer must differ from instance_id"));
      }
      if (agent.chatty->period_s <= 0) {
        throw ConfigError(field(i, "behavior.period_s must be > 0"));
      }
      if (agent.chatty->size_bytes < 1) {
        throw ConfigError(field(i, "behavior.size_bytes must be >= 1"));
      }
    } else {
      // Registering behaviors own their instance_id exclusively.
      if (!registering_ids.insert(agent.profile.instance_id).second) {
        throw ConfigError(field(i, "profile.instance_id '" +
                                       agent.profile.instance_id +
                                       "' registers more than once"));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// JitterSource

JitterSource::JitterSource(std::uint64_t seed, double stddev_s)
    : rng_(splitmix64(seed)), stddev_s_(stddev_s) {}

double JitterSource::next() {
  if (stddev_s_ <= 0) return 0.0;
  // Box-Muller on raw 53-bit uniforms keeps the sequence identical across
  // standard libraries.
  const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  const double z =
      std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return std::clamp(z * stddev_s_, -3.0 * stddev_s_, 3.0 * stddev_s_);
}

// ---------------------------------------------------------------------------
// SimEngine

SimEngine::SimEngine(SimulationConfig config) : config_(std::move(config)) {
  validate_config(config_);
  for (const auto& [name, type] : config_.topology.nodes) {
    if (type == NfType(NfType::Kind::Nrf)) nrf_node_ = name;
  }
  agents_.reserve(config_.agents.size());
  for (std::size_t i = 0; i < config_.agents.size(); ++i) {
    const AgentSpec& spec = config_.agents[i];
    AgentRuntime runtime;
    runtime.actor = spec.profile.instance_id + "#" + std::to_string(i);
    runtime.jitter = std::make_unique<JitterSource>(
        splitmix64(config_.seed) ^ fnv1a64(runtime.actor),
        spec.jitter_stddev_s);
    agents_.push_back(std::move(runtime));
  }
  for (std::size_t i = 0; i < config_.agents.size(); ++i) start_agent(i);
}

void SimEngine::start_agent(std::size_t index) {
  const AgentSpec& spec = config_.agents[index];
  const std::string& actor = agents_[index].actor;
  switch (spec.behavior) {
    case BehaviorKind::RegisterThenHeartbeat:
      queue_.schedule(spec.start_time_s, actor,
                      [this, index] { do_registration(index, true); });
      break;
    case BehaviorKind::RegisterOnly:
      queue_.schedule(spec.start_time_s, actor,
                      [this, index] { do_registration(index, false); });
      break;
    case BehaviorKind::Chatty:
      queue_.schedule(spec.start_time_s, actor,
                      [this, index] { do_chatty(index, config_.agents[index].start_time_s); });
      break;
  }
}

double SimEngine::next_gap(std::size_t index, double nominal) {
  const double jitter = agents_[index].jitter->next();
  // Gaps never shrink below half the nominal spacing, so the virtual
  // schedule stays monotone per agent.
  return std::max(nominal + jitter, nominal / 2.0);
}

void SimEngine::record(const TapMessage& message, double at) {
  PacketRecord r = tap_.tap(message, at);
  if (record_hook_) record_hook_(r);
}

void SimEngine::do_registration(std::size_t index, bool then_heartbeat) {
  const AgentSpec& spec = config_.agents[index];
  const double t = queue_.now();
  if (!exchange_fits(t)) return;

  NfProfile body = spec.profile;
  body.status = NfStatus::Registered;
  body.registered_at_s.reset();
  const RegistryRequest request = make_register_request(body, t);

  RegistryResponse response = registry_.register_nf(body, t);
  record({spec.profile.instance_id, nrf_node_, Protocol::Kind::Tcp,
          request.size_estimate},
         t);
  record({nrf_node_, spec.profile.instance_id, Protocol::Kind::Tcp,
          response.size_estimate},
         t + kResponseLatencyS);

  if (then_heartbeat) {
    const double next =
        t + next_gap(index, spec.profile.heartbeat_interval_s);
    if (exchange_fits(next)) {
      queue_.schedule(next, agents_[index].actor,
                      [this, index, next] { do_heartbeat(index, next); });
    }
  }
}

void SimEngine::do_heartbeat(std::size_t index, double t) {
  const AgentSpec& spec = config_.agents[index];
  if (!exchange_fits(t)) return;

  const ProfilePatch patch{NfStatus::Registered, std::nullopt};
  const RegistryRequest request =
      make_heartbeat_request(spec.profile.instance_id, patch, t);

  RegistryResponse response =
      registry_.heartbeat(spec.profile.instance_id, patch, t);
  record({spec.profile.instance_id, nrf_node_, Protocol::Kind::Tcp,
          request.size_estimate},
         t);
  record({nrf_node_, spec.profile.instance_id, Protocol::Kind::Tcp,
          response.size_estimate},
         t + kResponseLatencyS);

  const double next = t + next_gap(index, spec.profile.heartbeat_interval_s);
  if (!exchange_fits(next)) return;
  if (response.code == ResponseCode::NotFound) {
    // Registration lapsed; the NF must re-register before heartbeating again.
    queue_.schedule(next, agents_[index].actor,
                    [this, index] { do_registration(index, true); });
  } else {
    queue_.schedule(next, agents_[index].actor,
                    [this, index, next] { do_heartbeat(index, next); });
  }
}

void SimEngine::do_chatty(std::size_t index, double t) {
  const AgentSpec& spec = config_.agents[index];
  const ChattyBehavior& chatty = *spec.chatty;
  if (!exchange_fits(t)) return;

  record({spec.profile.instance_id, chatty.peer, chatty.protocol,
          chatty.size_bytes},
         t);
  record({chatty.peer, spec.profile.instance_id, chatty.protocol,
          kSbiHeaderBytes},
         t + kResponseLatencyS);

  const double next = t + next_gap(index, chatty.period_s);
  if (exchange_fits(next)) {
    queue_.schedule(next, agents_[index].actor,
                    [this, index, next] { do_chatty(index, next); });
  }
}

void SimEngine::advance_to(double t) {
  queue_.run_until(std::min(t, config_.duration_s));
}

void SimEngine::schedule(double t, std::string actor,
                         std::function<void()> action) {
  queue_.schedule(t, std::move(actor), std::move(action));
}

Trace SimEngine::snapshot_trace() const {
  TraceTap copy = tap_;
  const double last =
      copy.records().empty() ? 0.0 : copy.records().back().timestamp_s;
  return copy.finalize(std::max(queue_.now(), last), config_.topology);
}

Trace SimEngine::run_to_end() {
  advance_to(config_.duration_s);
  return tap_.finalize(config_.duration_s, config_.topology);
}

Trace run_simulation(const SimulationConfig& config) {
  SimEngine engine(config);
  return engine.run_to_end();
}

// ---------------------------------------------------------------------------
// Scenarios

namespace {

AgentSpec heartbeat_agent(std::string id, NfType::Kind type, int interval_s,
                          int load, std::vector<std::string> services,
                          double start_s, double jitter_s) {
  AgentSpec agent;
  agent.profile.instance_id = std::move(id);
  agent.profile.nf_type = NfType(type);
  agent.profile.heartbeat_interval_s = interval_s;
  agent.profile.load = load;
  agent.profile.services = std::move(services);
  agent.behavior = BehaviorKind::RegisterThenHeartbeat;
  agent.start_time_s = start_s;
  agent.jitter_stddev_s = jitter_s;
  return agent;
}

AgentSpec chatty_agent(std::string id, NfType::Kind type, std::string peer,
                       Protocol protocol, double period_s,
                       std::uint32_t size_bytes, double start_s,
                       double jitter_s) {
  AgentSpec agent;
  agent.profile.instance_id = std::move(id);
  agent.profile.nf_type = NfType(type);
  agent.profile.heartbeat_interval_s = 3600;  // unused by CHATTY
  agent.behavior = BehaviorKind::Chatty;
  agent.chatty = ChattyBehavior{std::move(peer), period_s, size_bytes, protocol};
  agent.start_time_s = start_s;
  agent.jitter_stddev_s = jitter_s;
  return agent;
}

}  // namespace

SimulationConfig bsf_reference_scenario() {
  SimulationConfig config;
  config.seed = 1;
  config.duration_s = 8280.0;  // 138 minutes
  config.topology.nodes = {{"nrf-1", NfType::Kind::Nrf},
                           {"bsf-1", NfType::Kind::Bsf}};
  config.topology.links = {{"bsf-1", "nrf-1"}};
  config.agents.push_back(heartbeat_agent(
      "bsf-1", NfType::Kind::Bsf, 10, 10, {"nbsf-management"}, 0.0, 0.0));
  return config;
}

SimulationConfig default_scenario() {
  SimulationConfig config;
  config.seed = 42;
  config.duration_s = 8280.0;
  config.topology.nodes = {
      {"nrf-1", NfType::Kind::Nrf},   {"bsf-1", NfType::Kind::Bsf},
      {"amf-1", NfType::Kind::Amf},   {"smf-1", NfType::Kind::Smf},
      {"upf-1", NfType::Kind::Upf},   {"gnb-1", NfType::Kind::Gnb},
      {"udm-1", NfType::Kind::Udm},   {"udr-1", NfType::Kind::Udr},
      {"nwdaf-1", NfType::Kind::Nwdaf},
  };
  config.topology.links = {
      {"bsf-1", "nrf-1"}, {"amf-1", "nrf-1"},   {"smf-1", "nrf-1"},
      {"smf-1", "upf-1"}, {"gnb-1", "amf-1"},   {"udm-1", "udr-1"},
      {"nwdaf-1", "nrf-1"},
  };

  // The BSF runs jitter-free so its registration lands in the first
  // throughput bucket and its heartbeat count is seed-independent; the other
  // agents start away from multiples of their period so jitter drift cannot
  // push an exchange across the end of the window.
  config.agents.push_back(heartbeat_agent("bsf-1", NfType::Kind::Bsf, 10, 10,
                                          {"nbsf-management"}, 0.5, 0.0));
  config.agents.push_back(heartbeat_agent("amf-1", NfType::Kind::Amf, 20, 25,
                                          {"namf-comm"}, 7.3,
                                          kDefaultJitterStddevS));
  config.agents.push_back(heartbeat_agent("smf-1", NfType::Kind::Smf, 20, 30,
                                          {"nsmf-pdusession"}, 13.7,
                                          kDefaultJitterStddevS));

  AgentSpec nwdaf = heartbeat_agent(
      "nwdaf-1", NfType::Kind::Nwdaf, 60, 5,
      {"AnalyticsSubscription", "AnalyticsInfo", "DataManagement"}, 0.6, 0.0);
  nwdaf.behavior = BehaviorKind::RegisterOnly;
  config.agents.push_back(std::move(nwdaf));

  config.agents.push_back(chatty_agent("upf-1", NfType::Kind::Upf, "smf-1",
                                       Protocol::Kind::Pfcp, 30.0, 120, 12.0,
                                       kDefaultJitterStddevS));
  config.agents.push_back(chatty_agent("gnb-1", NfType::Kind::Gnb, "amf-1",
                                       Protocol::Kind::NgapSetup, 10000.0, 150,
                                       1.0, 0.0));
  config.agents.push_back(chatty_agent("gnb-1", NfType::Kind::Gnb, "amf-1",
                                       Protocol::Kind::NgapInitial, 60.0, 90,
                                       30.0, kDefaultJitterStddevS));
  config.agents.push_back(chatty_agent("gnb-1", NfType::Kind::Gnb, "amf-1",
                                       Protocol::Kind::NgapUplink, 45.0, 80,
                                       20.0, kDefaultJitterStddevS));
  config.agents.push_back(chatty_agent("gnb-1", NfType::Kind::Gnb, "amf-1",
                                       Protocol::Kind::Sctp, 120.0, 60, 25.0,
                                       kDefaultJitterStddevS));
  config.agents.push_back(chatty_agent("udm-1", NfType::Kind::Udm, "udr-1",
                                       Protocol::Kind::Ssl, 600.0, 1400, 50.0,
                                       kDefaultJitterStddevS));
  config.agents.push_back(chatty_agent("upf-1", NfType::Kind::Upf, "gnb-1",
                                       Protocol::Kind::Icmp, 300.0, 64, 35.0,
                                       kDefaultJitterStddevS));
  return config;
}

// ---------------------------------------------------------------------------
// Config JSON

namespace {

std::string_view behavior_label(BehaviorKind kind) {
  switch (kind) {
    case BehaviorKind::RegisterThenHeartbeat:
      return "REGISTER_THEN_HEARTBEAT";
    case BehaviorKind::RegisterOnly:
      return "REGISTER_ONLY";
    case BehaviorKind::Chatty:
      return "CHATTY";
  }
  return "REGISTER_THEN_HEARTBEAT";
}

}  // namespace

void to_json(nlohmann::json& j, const SimulationConfig& config) {
  auto agents = nlohmann::json::array();
  for (const AgentSpec& agent : config.agents) {
    nlohmann::json profile{
        {"instance_id", agent.profile.instance_id},
        {"nf_type", agent.profile.nf_type},
        {"heartbeat_interval_s", agent.profile.heartbeat_interval_s},
        {"load", agent.profile.load},
        {"services", agent.profile.services},
    };
    nlohmann::json behavior{{"kind", std::string(behavior_label(agent.behavior))}};
    if (agent.chatty) {
      behavior["peer"] = agent.chatty->peer;
      behavior["period_s"] = agent.chatty->period_s;
      behavior["size_bytes"] = agent.chatty->size_bytes;
      behavior["protocol"] = agent.chatty->protocol;
    }
    agents.push_back({{"profile", std::move(profile)},
                      {"behavior", std::move(behavior)},
                      {"start_time_s", agent.start_time_s},
                      {"jitter_stddev_s", agent.jitter_stddev_s}});
  }
  j = nlohmann::json{{"seed", config.seed},
                     {"duration_s", config.duration_s},
                     {"topology", config.topology},
                     {"agents", std::move(agents)}};
}

void from_json(const nlohmann::json& j, SimulationConfig& config) {
  config = SimulationConfig{};
  config.seed = j.value("seed", std::uint64_t{0});
  config.duration_s = j.at("duration_s").get<double>();
  j.at("topology").get_to(config.topology);
  for (const auto& item : j.at("agents")) {
    AgentSpec agent;
    const auto& profile = item.at("profile");
    profile.at("instance_id").get_to(agent.profile.instance_id);
    profile.at("nf_type").get_to(agent.profile.nf_type);
    profile.at("heartbeat_interval_s").get_to(agent.profile.heartbeat_interval_s);
    agent.profile.load = profile.value("load", 0);
    if (profile.contains("services")) {
      profile.at("services").get_to(agent.profile.services);
    }

    const auto& behavior = item.at("behavior");
    const std::string kind = behavior.at("kind").get<std::string>();
    if (kind == "REGISTER_THEN_HEARTBEAT") {
      agent.behavior = BehaviorKind::RegisterThenHeartbeat;
    } else if (kind == "REGISTER_ONLY") {
      agent.behavior = BehaviorKind::RegisterOnly;
    } else if (kind == "CHATTY") {
      agent.behavior = BehaviorKind::Chatty;
      ChattyBehavior chatty;
      behavior.at("peer").get_to(chatty.peer);
      behavior.at("period_s").get_to(chatty.period_s);
      behavior.at("size_bytes").get_to(chatty.size_bytes);
      if (behavior.contains("protocol")) {
        behavior.at("protocol").get_to(chatty.protocol);
      }
      agent.chatty = std::move(chatty);
    } else {
      throw ConfigError("agents[].behavior.kind unknown: " + kind);
    }

    agent.start_time_s = item.value("start_time_s", 0.0);
    agent.jitter_stddev_s = item.value("jitter_stddev_s", kDefaultJitterStddevS);
    config.agents.push_back(std::move(agent));
  }
}

SimulationConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  SimulationConfig config;
  try {
    j.get_to(config);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config schema error: " + std::string(e.what()));
  }
  validate_config(config);
  return config;
}

void save_config_file(const SimulationConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << nlohmann::json(config).dump(2) << '\n';
}

}  // namespace sba
