#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sba/model.hpp"

using namespace sba;

TEST_CASE("protocol labels parse back to themselves") {
  CHECK(parse_protocol("PFCP") == Protocol(Protocol::Kind::Pfcp));
  CHECK(parse_protocol("TCP") == Protocol(Protocol::Kind::Tcp));
  CHECK(parse_protocol("HTTP2-custom") == Protocol::other("HTTP2-custom"));
  CHECK(parse_protocol("HTTP2-custom").label() == "HTTP2-custom");
}

TEST_CASE("protocol and nf type round-trip for every variant") {
  const std::vector<Protocol> protocols = {
      Protocol::Kind::Tcp,         Protocol::Kind::Ssl,
      Protocol::Kind::Pfcp,        Protocol::Kind::NgapSetup,
      Protocol::Kind::NgapInitial, Protocol::Kind::NgapUplink,
      Protocol::Kind::Sctp,        Protocol::Kind::Icmp,
      Protocol::other("QUIC"),     Protocol::other("weird proto 7"),
  };
  for (const Protocol& p : protocols) {
    CHECK(Protocol::parse(p.label()) == p);
  }

  const std::vector<std::string> type_labels = {
      "NRF", "BSF", "AMF", "SMF", "UPF",   "AUSF", "UDM",
      "UDR", "PCF", "NSSF", "NWDAF", "GNB", "CHF-custom",
  };
  for (const std::string& label : type_labels) {
    CHECK(NfType::parse(label).label() == label);
    CHECK(NfType::parse(NfType::parse(label).label()) == NfType::parse(label));
  }

  // Constructing Other with a known label collapses to the known variant,
  // so round-trips hold for every constructible value.
  CHECK(Protocol::other("TCP") == Protocol(Protocol::Kind::Tcp));
  CHECK(NfType::other("NRF") == NfType(NfType::Kind::Nrf));
}

TEST_CASE("random other labels round-trip") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Protocol p = testing::random_protocol(rng);
    CHECK(Protocol::parse(p.label()) == p);
  }
}

TEST_CASE("status transition matrix is exactly the legal set") {
  using S = NfStatus;
  const std::vector<std::pair<S, S>> legal = {
      {S::Deregistered, S::Registered}, {S::Registered, S::Suspended},
      {S::Suspended, S::Registered},    {S::Registered, S::Deregistered},
      {S::Suspended, S::Deregistered},
  };
  for (S from : {S::Registered, S::Suspended, S::Deregistered}) {
    for (S to : {S::Registered, S::Suspended, S::Deregistered}) {
      const bool expected =
          std::find(legal.begin(), legal.end(), std::make_pair(from, to)) !=
          legal.end();
      CHECK(legal_transition(from, to) == expected);
    }
  }
}

TEST_CASE("profile validation") {
  NfProfile profile;
  profile.instance_id = "bsf-1";
  profile.nf_type = NfType::Kind::Bsf;
  profile.heartbeat_interval_s = 10;
  profile.load = 10;
  CHECK(validate_profile(profile).empty());

  profile.load = 150;
  CHECK(validate_profile(profile).size() == 1);
  profile.load = 10;
  profile.heartbeat_interval_s = 0;
  CHECK_FALSE(validate_profile(profile).empty());
}

TEST_CASE("validate_trace flags the offending record and rule") {
  Trace empty;
  CHECK(validate_trace(empty).empty());

  Trace unordered;
  unordered.duration_s = 10;
  unordered.records = {
      {5.0, "a", "b", Protocol::Kind::Tcp, 10},
      {3.0, "a", "b", Protocol::Kind::Tcp, 10},
  };
  const auto violations = validate_trace(unordered);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0] == "ordering violated at index 1");

  Trace zero_length;
  zero_length.duration_s = 10;
  zero_length.records = {{1.0, "a", "b", Protocol::Kind::Tcp, 0}};
  const auto zl = validate_trace(zero_length);
  REQUIRE(zl.size() == 1);
  CHECK(zl[0] == "length >= 1 violated at index 0");

  Trace bad;
  bad.duration_s = 4;
  bad.records = {
      {-1.0, "a", "b", Protocol::Kind::Tcp, 10},
      {2.0, "a", "a", Protocol::Kind::Tcp, 10},
      {5.0, "a", "b", Protocol::Kind::Tcp, 10},
  };
  const auto more = validate_trace(bad);
  CHECK(std::count(more.begin(), more.end(),
                   std::string("timestamp >= 0 violated at index 0")) == 1);
  CHECK(std::count(more.begin(), more.end(),
                   std::string("src != dst violated at index 1")) == 1);
  CHECK(std::count(more.begin(), more.end(),
                   std::string("timestamp <= duration violated at index 2")) == 1);
}

TEST_CASE("randomly generated valid traces pass validation") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Trace trace = testing::random_trace(rng, 200);
    CHECK(validate_trace(trace).empty());
  }
}

TEST_CASE("topology validation") {
  Topology topology;
  topology.nodes = {{"a", NfType::Kind::Nrf}, {"b", NfType::Kind::Bsf}};
  topology.links = {{"a", "b"}};
  CHECK(validate_topology(topology).empty());

  topology.links.push_back({"a", "a"});
  topology.links.push_back({"a", "ghost"});
  const auto violations = validate_topology(topology);
  CHECK(violations.size() == 2);
}
