#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sba/capture.hpp"
#include "sba/simulation.hpp"

using namespace sba;

namespace {

/// Independent event-count oracle: how many heartbeat exchanges fit the
/// window when the first fires one interval after start.
std::size_t expected_heartbeats(double start_s, double interval_s,
                                double duration_s) {
  std::size_t count = 0;
  for (double t = start_s + interval_s; t + kResponseLatencyS <= duration_s;
       t += interval_s) {
    ++count;
  }
  return count;
}

std::vector<PacketRecord> records_between(const Trace& trace,
                                          const std::string& src,
                                          const std::string& dst) {
  std::vector<PacketRecord> out;
  for (const auto& r : trace.records) {
    if (r.src == src && r.dst == dst) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("reference scenario: one registration plus 827 heartbeat exchanges") {
  CHECK(expected_heartbeats(0.0, 10.0, 8280.0) == 827);  // frozen oracle value

  const Trace trace = run_simulation(bsf_reference_scenario());
  CHECK(validate_trace(trace).empty());
  CHECK(trace.duration_s == 8280.0);

  const auto requests = records_between(trace, "bsf-1", "nrf-1");
  const auto responses = records_between(trace, "nrf-1", "bsf-1");
  REQUIRE(requests.size() == 1 + 827);
  CHECK(responses.size() == 1 + 827);
  CHECK(trace.records.size() == 2 * (1 + 827));

  CHECK(requests.front().timestamp_s == 0.0);
  CHECK(requests[1].timestamp_s == 10.0);
  CHECK(requests.back().timestamp_s == 8270.0);
}

TEST_CASE("short window: only the registration exchange fits") {
  SimulationConfig config = bsf_reference_scenario();
  config.duration_s = 5.0;
  const Trace trace = run_simulation(config);
  CHECK(trace.records.size() == 2);
}

TEST_CASE("identical config and seed produce byte-identical traces") {
  const SimulationConfig config = default_scenario();
  const Trace a = run_simulation(config);
  const Trace b = run_simulation(config);
  std::ostringstream csv_a, csv_b;
  export_csv(a, csv_a);
  export_csv(b, csv_b);
  CHECK(csv_a.str() == csv_b.str());
  CHECK(csv_a.str().size() > 1000);
}

TEST_CASE("seed changes jittered timestamps but not exchange counts") {
  SimulationConfig config = default_scenario();
  config.seed = 1;
  const Trace a = run_simulation(config);
  config.seed = 2;
  const Trace b = run_simulation(config);

  REQUIRE(a.records.size() == b.records.size());
  std::map<std::string, std::size_t> counts_a, counts_b;
  for (const auto& r : a.records) ++counts_a[r.protocol.label()];
  for (const auto& r : b.records) ++counts_b[r.protocol.label()];
  CHECK(counts_a == counts_b);

  bool any_timestamp_differs = false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    if (a.records[i].timestamp_s != b.records[i].timestamp_s) {
      any_timestamp_differs = true;
      break;
    }
  }
  CHECK(any_timestamp_differs);
}

TEST_CASE("zero-jitter heartbeat cadence is exact") {
  const Trace trace = run_simulation(bsf_reference_scenario());
  const auto requests = records_between(trace, "bsf-1", "nrf-1");
  for (std::size_t i = 2; i < requests.size(); ++i) {
    CHECK(requests[i].timestamp_s - requests[i - 1].timestamp_s == 10.0);
  }
}

TEST_CASE("every request has exactly one response with endpoints swapped") {
  const Trace trace = run_simulation(default_scenario());
  CHECK(trace.records.size() % 2 == 0);

  std::multiset<std::tuple<std::string, std::string, double>> index;
  for (const auto& r : trace.records) {
    index.insert({r.src, r.dst, r.timestamp_s});
  }
  std::size_t requests = 0;
  for (const auto& r : trace.records) {
    if (index.count({r.dst, r.src, r.timestamp_s + kResponseLatencyS}) == 1) {
      ++requests;
    }
  }
  CHECK(requests == trace.records.size() / 2);
}

TEST_CASE("the registration request is the largest packet an agent sends") {
  const Trace trace = run_simulation(default_scenario());
  for (const std::string agent : {"bsf-1", "amf-1", "smf-1"}) {
    // The registration is the agent's first message toward the NRF; every
    // other packet it sends (heartbeats, stub acks) must be strictly smaller.
    const auto toward_nrf = records_between(trace, agent, "nrf-1");
    REQUIRE(!toward_nrf.empty());
    const PacketRecord& registration = toward_nrf.front();
    std::size_t checked = 0;
    for (const auto& r : trace.records) {
      if (r.src != agent) continue;
      if (r.timestamp_s == registration.timestamp_s &&
          r.dst == registration.dst) {
        continue;  // the registration itself
      }
      CHECK(r.length_bytes < registration.length_bytes);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("chatty agents emit protocol-labeled exchanges") {
  const Trace trace = run_simulation(default_scenario());
  const auto pfcp = records_between(trace, "upf-1", "smf-1");
  REQUIRE(!pfcp.empty());
  CHECK(pfcp.front().protocol == Protocol(Protocol::Kind::Pfcp));
  CHECK(pfcp.front().length_bytes == 120);

  const auto acks = records_between(trace, "smf-1", "upf-1");
  REQUIRE(!acks.empty());
  CHECK(acks.front().protocol == Protocol(Protocol::Kind::Pfcp));
  CHECK(acks.front().length_bytes == kSbiHeaderBytes);

  // The one-shot setup exchange appears exactly once.
  std::size_t setup = 0;
  for (const auto& r : trace.records) {
    if (r.protocol == Protocol(Protocol::Kind::NgapSetup)) ++setup;
  }
  CHECK(setup == 2);
}

TEST_CASE("invalid configurations are rejected before any event runs") {
  SimulationConfig config = bsf_reference_scenario();
  config.duration_s = 0;
  CHECK_THROWS_AS(validate_config(config), ConfigError);

  config = bsf_reference_scenario();
  config.agents[0].profile.instance_id = "ghost-1";
  CHECK_THROWS_AS(run_simulation(config), ConfigError);

  config = bsf_reference_scenario();
  config.agents[0].jitter_stddev_s = 5.0;  // >= interval / 2
  CHECK_THROWS_AS(run_simulation(config), ConfigError);

  config = bsf_reference_scenario();
  config.topology.nodes[0].second = NfType::Kind::Amf;  // no NRF left
  CHECK_THROWS_AS(run_simulation(config), ConfigError);

  config = bsf_reference_scenario();
  config.agents.push_back(config.agents[0]);  // same id registers twice
  CHECK_THROWS_AS(run_simulation(config), ConfigError);
}

TEST_CASE("config files round-trip through JSON") {
  const SimulationConfig config = default_scenario();
  nlohmann::json j = config;
  SimulationConfig back = j.get<SimulationConfig>();
  CHECK(back.seed == config.seed);
  CHECK(back.duration_s == config.duration_s);
  CHECK(back.topology == config.topology);
  REQUIRE(back.agents.size() == config.agents.size());
  for (std::size_t i = 0; i < config.agents.size(); ++i) {
    CHECK(back.agents[i].profile == config.agents[i].profile);
    CHECK(back.agents[i].behavior == config.agents[i].behavior);
    CHECK(back.agents[i].start_time_s == config.agents[i].start_time_s);
    CHECK(back.agents[i].jitter_stddev_s == config.agents[i].jitter_stddev_s);
    if (config.agents[i].chatty) {
      REQUIRE(back.agents[i].chatty.has_value());
      CHECK(back.agents[i].chatty->peer == config.agents[i].chatty->peer);
      CHECK(back.agents[i].chatty->protocol == config.agents[i].chatty->protocol);
    }
  }

  // Same seed through the JSON round-trip keeps the trace identical.
  std::ostringstream direct, via_json;
  export_csv(run_simulation(config), direct);
  export_csv(run_simulation(back), via_json);
  CHECK(direct.str() == via_json.str());
}

TEST_CASE("deterministic jitter stays within its clamp") {
  JitterSource jitter(12345, 0.05);
  for (int i = 0; i < 1000; ++i) {
    const double j = jitter.next();
    CHECK(j >= -0.15);
    CHECK(j <= 0.15);
  }
  JitterSource a(7, 0.05), b(7, 0.05);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}
