#include "sba/cli.hpp"

#include <algorithm>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sba/analytics.hpp"
#include "sba/capture.hpp"
#include "sba/http_service.hpp"
#include "sba/simulation.hpp"

namespace sba::cli {

namespace {

namespace fs = std::filesystem;

std::optional<double> env_double(const char* name) {
  const char* value = std::getenv(name);
  if (!value || *value == '\0') return std::nullopt;
  try {
    return std::stod(value);
  } catch (const std::exception&) {
    std::cerr << "warning: ignoring non-numeric " << name << "=" << value
              << "\n";
    return std::nullopt;
  }
}

std::string sanitize_for_filename(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return out;
}

struct PairArg {
  std::string a;
  std::string b;
};

std::optional<PairArg> parse_pair(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    return std::nullopt;
  }
  PairArg pair{text.substr(0, colon), text.substr(colon + 1)};
  if (pair.a == pair.b) return std::nullopt;
  return pair;
}

/// Busiest unordered pair by exchanged bytes, endpoints ordered
/// lexicographically; nullopt on an empty trace.
std::optional<PairArg> busiest_pair(const Trace& trace) {
  std::map<std::pair<std::string, std::string>, std::uint64_t> bytes;
  for (const auto& r : trace.records) {
    auto key = r.src < r.dst ? std::make_pair(r.src, r.dst)
                             : std::make_pair(r.dst, r.src);
    bytes[key] += r.length_bytes;
  }
  if (bytes.empty()) return std::nullopt;
  auto best = bytes.begin();
  for (auto it = bytes.begin(); it != bytes.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return PairArg{best->first.first, best->first.second};
}

void write_counts_csv(const std::map<Protocol, std::uint64_t>& counts,
                      const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << "protocol,count\n";
  std::vector<std::pair<Protocol, std::uint64_t>> entries(counts.begin(),
                                                          counts.end());
  std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first.label() < y.first.label();
  });
  for (const auto& [protocol, count] : entries) {
    out << protocol.label() << ',' << count << '\n';
  }
}

void write_stats_csv(const std::vector<analytics::ProtocolStats>& stats,
                     const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << "protocol,count,mean_length,stddev_length,min_length,max_length\n";
  for (const auto& s : stats) {
    out << s.protocol.label() << ',' << s.count << ','
        << format_double(s.mean_length) << ',' << format_double(s.stddev_length)
        << ',' << s.min_length << ',' << s.max_length << '\n';
  }
}

void write_throughput_csv(const analytics::ThroughputSeries& series,
                          const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << "bucket_start_s,bytes\n";
  for (std::size_t i = 0; i < series.bucket_bytes.size(); ++i) {
    out << format_double(series.bucket_start(i)) << ','
        << series.bucket_bytes[i] << '\n';
  }
}

void write_events_csv(const std::vector<analytics::NfEvent>& events,
                      const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << "timestamp_s,kind,packet_length,confidence\n";
  for (const auto& e : events) {
    out << format_double(e.timestamp_s) << ',' << analytics::to_label(e.kind)
        << ',' << e.packet_length << ',' << format_double(e.confidence)
        << '\n';
  }
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed_override) {
  SimulationConfig config;
  try {
    config = load_config_file(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (seed_override) config.seed = *seed_override;

  Trace trace;
  try {
    trace = run_simulation(config);
    export_csv_file(trace, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::cout << "records=" << trace.records.size()
            << " duration_s=" << format_double(trace.duration_s)
            << " agents=" << config.agents.size() << "\n";
  return kExitOk;
}

int cmd_analyze(const std::string& trace_path, const std::string& report_dir,
                const std::vector<std::string>& pair_args, bool strict) {
  IngestResult ingested;
  try {
    IngestOptions options;
    options.strict = strict;
    ingested = trace_path == "-" ? ingest_csv(std::cin, options)
                                 : ingest_csv_file(trace_path, options);
  } catch (const IngestError& e) {
    std::cerr << "trace error in " << trace_path << ": " << e.what() << "\n";
    return kExitTrace;
  } catch (const std::exception& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return kExitTrace;
  }
  const Trace& trace = ingested.trace;
  if (ingested.reorder_warnings > 0) {
    std::cerr << "warning: sorted " << ingested.reorder_warnings
              << " out-of-order rows\n";
  }

  std::vector<PairArg> pairs;
  for (const std::string& text : pair_args) {
    auto pair = parse_pair(text);
    if (!pair) {
      std::cerr << "config error: --pair expects <a>:<b> with distinct nodes, got '"
                << text << "'\n";
      return kExitConfig;
    }
    pairs.push_back(*pair);
  }
  if (pairs.empty()) {
    if (auto pair = busiest_pair(trace)) pairs.push_back(*pair);
  }

  const nwdaf::AnalyticsOptions options = options_from_env();

  std::error_code ec;
  fs::create_directories(report_dir, ec);
  if (ec) {
    std::cerr << "config error: cannot create report dir " << report_dir
              << ": " << ec.message() << "\n";
    return kExitConfig;
  }
  const fs::path dir(report_dir);

  const auto counts = analytics::packets_per_protocol(trace);
  const auto stats = analytics::length_stats(trace);
  write_counts_csv(counts, dir / "protocol_counts.csv");
  write_stats_csv(stats, dir / "protocol_stats.csv");

  // No input paths inside the report: identical trace bytes must yield
  // byte-identical report files wherever they live.
  nlohmann::json report{
      {"trace",
       {{"records", trace.records.size()},
        {"duration_s", trace.duration_s},
        {"reorder_warnings", ingested.reorder_warnings}}},
      {"protocol_counts", analytics::counts_json(counts)},
      {"protocol_stats", analytics::stats_json(stats)},
      {"pairs", nlohmann::json::array()},
  };

  for (const PairArg& pair : pairs) {
    nlohmann::json entry{{"a", pair.a}, {"b", pair.b}};
    try {
      const auto throughput_report = nwdaf::analytics_info(
          {nwdaf::AnalyticsId::Kind::PairThroughput, pair.a, pair.b}, trace,
          options, "trace");
      const auto events_report = nwdaf::analytics_info(
          {nwdaf::AnalyticsId::Kind::NfEvents, pair.a, pair.b}, trace, options,
          "trace");
      const auto placement_report = nwdaf::analytics_info(
          {nwdaf::AnalyticsId::Kind::Placement, pair.a, pair.b}, trace,
          options, "trace");

      const auto series = analytics::pair_throughput(trace, pair.a, pair.b,
                                                     options.bucket_width_s);
      const std::string suffix =
          sanitize_for_filename(pair.a) + "_" + sanitize_for_filename(pair.b);
      write_throughput_csv(series, dir / ("throughput_" + suffix + ".csv"));

      std::vector<analytics::NfEvent> events;
      if (events_report.status == "OK") {
        for (const auto& item : events_report.payload) {
          analytics::NfEvent e;
          const std::string kind = item.at("kind").get<std::string>();
          if (kind == "REGISTRATION_SPIKE") {
            e.kind = analytics::NfEventKind::RegistrationSpike;
          } else if (kind == "HEARTBEAT_REQUEST") {
            e.kind = analytics::NfEventKind::HeartbeatRequest;
          } else if (kind == "HEARTBEAT_ACK") {
            e.kind = analytics::NfEventKind::HeartbeatAck;
          } else {
            e.kind = analytics::NfEventKind::Deregistration;
          }
          e.timestamp_s = item.at("timestamp_s").get<double>();
          e.packet_length = item.at("packet_length").get<std::uint32_t>();
          e.confidence = item.at("confidence").get<double>();
          events.push_back(e);
        }
      }
      write_events_csv(events, dir / ("events_" + suffix + ".csv"));

      entry["throughput"] = throughput_report.to_json();
      entry["events"] = events_report.to_json();
      entry["placement"] = placement_report.to_json();

      const auto& placement = placement_report.payload;
      std::cout << "pair " << pair.a << "<->" << pair.b
                << " decision=" << placement.at("decision").get<std::string>()
                << " profile="
                << placement.at("exchange_profile").get<std::string>()
                << " mean_bps="
                << format_double(placement.at("mean_rate_bps").get<double>())
                << " peak_bps="
                << format_double(placement.at("peak_rate_bps").get<double>())
                << "\n";
    } catch (const nwdaf::NotFoundError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    }
    report["pairs"].push_back(std::move(entry));
  }

  std::ofstream out(dir / "report.json", std::ios::binary);
  out << report.dump(2) << '\n';
  if (!out) {
    std::cerr << "trace error: cannot write report.json\n";
    return kExitTrace;
  }
  std::cout << "reports written to " << report_dir << "\n";
  return kExitOk;
}

http::NwdafServer* g_active_server = nullptr;

void handle_interrupt(int) {
  if (g_active_server) g_active_server->stop();
}

int cmd_serve(const std::string& config_path, const std::string& listen,
              const std::string& out_path,
              std::optional<std::uint64_t> seed_override, double pace) {
  SimulationConfig config;
  try {
    config = load_config_file(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (seed_override) config.seed = *seed_override;

  http::ServeOptions serve_options;
  serve_options.pace = pace;
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "config error: --listen expects <host>:<port>\n";
    return kExitConfig;
  }
  serve_options.host = listen.substr(0, colon);
  try {
    serve_options.port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    std::cerr << "config error: --listen port not numeric\n";
    return kExitConfig;
  }

  nwdaf::Runtime runtime(std::move(config), options_from_env());
  http::NwdafServer server(runtime, serve_options);
  if (!server.bind()) {
    std::cerr << "bind error: cannot listen on " << listen << "\n";
    return kExitBind;
  }

  g_active_server = &server;
  std::signal(SIGINT, handle_interrupt);
  std::signal(SIGTERM, handle_interrupt);
  std::cout << "listening on " << serve_options.host << ":" << server.port()
            << " (virtual clock at " << format_double(runtime.now()) << " s)"
            << std::endl;
  server.run();
  g_active_server = nullptr;

  // Shutdown always flushes whatever the tap captured so far.
  try {
    export_csv_file(runtime.snapshot_trace(), out_path);
    std::cout << "trace flushed to " << out_path << "\n";
  } catch (const std::exception& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return kExitTrace;
  }
  return kExitOk;
}

}  // namespace

nwdaf::AnalyticsOptions options_from_env() {
  nwdaf::AnalyticsOptions options;
  if (auto v = env_double("NWDAF_SPIKE_SIGMA")) options.events.spike_sigma = *v;
  if (auto v = env_double("NWDAF_STEADY_FRACTION")) {
    options.events.steady_state_fraction = *v;
  }
  if (auto v = env_double("NWDAF_PERIOD_CV_MAX")) options.events.max_period_cv = *v;
  if (auto v = env_double("NWDAF_BUCKET_WIDTH_S")) options.bucket_width_s = *v;
  if (auto v = env_double("NWDAF_PLACEMENT_LOW_BPS")) {
    options.placement.low_rate_bps = *v;
  }
  if (auto v = env_double("NWDAF_PLACEMENT_HIGH_BPS")) {
    options.placement.high_rate_bps = *v;
  }
  if (auto v = env_double("NWDAF_BURST_RATIO")) options.placement.burst_ratio = *v;
  return options;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Desk-scale 5G core control-plane testbed with an NWDAF"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path = "trace.csv";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto* simulate = app.add_subcommand(
      "simulate", "Run a scenario and write the capture as CSV");
  simulate->add_option("--config", config_path, "Scenario file (JSON)")
      ->required();
  simulate->add_option("--out", out_path, "Output trace path")->required();
  simulate->add_option("--seed", seed, "Override the scenario seed")
      ->each([&](const std::string&) { seed_set = true; });

  std::string trace_path;
  std::string report_dir = "reports";
  std::vector<std::string> pair_args;
  bool strict = false;

  auto* analyze = app.add_subcommand(
      "analyze", "Ingest a trace and emit figure-ready reports");
  analyze->add_option("trace", trace_path, "Trace CSV path")->required();
  analyze->add_option("--report-dir", report_dir, "Report output directory");
  analyze->add_option("--pair", pair_args,
                      "NF pair <a>:<b> to analyze (repeatable); defaults to "
                      "the busiest pair");
  analyze->add_flag("--strict-ingest", strict,
                    "Reject out-of-order rows and skip metadata");

  std::string listen = "127.0.0.1:8080";
  std::string serve_out = "serve-trace.csv";
  double pace = 0.0;

  auto* serve = app.add_subcommand(
      "serve", "Run the simulation behind live NWDAF service endpoints");
  serve->add_option("--config", config_path, "Scenario file (JSON)")
      ->required();
  serve->add_option("--listen", listen, "Listen endpoint <host>:<port>");
  serve->add_option("--out", serve_out, "Trace flush path on shutdown");
  serve->add_option("--seed", seed, "Override the scenario seed")
      ->each([&](const std::string&) { seed_set = true; });
  serve->add_option(
      "--pace", pace,
      "Virtual seconds advanced per wall second (0 = advance via POST "
      "/sim/advance only)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  const std::optional<std::uint64_t> seed_override =
      seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt;

  if (simulate->parsed()) return cmd_simulate(config_path, out_path, seed_override);
  if (analyze->parsed()) return cmd_analyze(trace_path, report_dir, pair_args, strict);
  if (serve->parsed()) return cmd_serve(config_path, listen, serve_out, seed_override, pace);
  return kExitConfig;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace sba::cli
