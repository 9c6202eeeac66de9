#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sba/capture.hpp"
#include "sba/cli.hpp"
#include "sba/simulation.hpp"

using namespace sba;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("sba_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int value = 0;
    return value;
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("simulate then analyze end to end") {
  TempDir dir;
  const std::string config_path = dir.file("scenario.json");
  save_config_file(default_scenario(), config_path);

  const std::string trace_path = dir.file("trace.csv");
  CHECK(cli::run({"simulate", "--config", config_path, "--out", trace_path}) ==
        cli::kExitOk);
  CHECK(fs::exists(trace_path));

  const std::string report_dir = dir.file("reports");
  CHECK(cli::run({"analyze", trace_path, "--report-dir", report_dir, "--pair",
                  "bsf-1:nrf-1"}) == cli::kExitOk);
  CHECK(fs::exists(fs::path(report_dir) / "protocol_counts.csv"));
  CHECK(fs::exists(fs::path(report_dir) / "protocol_stats.csv"));
  CHECK(fs::exists(fs::path(report_dir) / "throughput_bsf-1_nrf-1.csv"));
  CHECK(fs::exists(fs::path(report_dir) / "events_bsf-1_nrf-1.csv"));
  CHECK(fs::exists(fs::path(report_dir) / "report.json"));

  const std::string counts = read_file(
      (fs::path(report_dir) / "protocol_counts.csv").string());
  CHECK(counts.rfind("protocol,count\nTCP,", 0) == 0);  // TCP leads the file
}

TEST_CASE("missing or invalid config exits with the config code") {
  TempDir dir;
  CHECK(cli::run({"simulate", "--config", dir.file("absent.json"), "--out",
                  dir.file("t.csv")}) == cli::kExitConfig);

  const std::string bad = dir.file("bad.json");
  {
    std::ofstream out(bad);
    out << "{\"duration_s\": 0, \"topology\": {\"nodes\": []}, \"agents\": []}";
  }
  CHECK(cli::run({"simulate", "--config", bad, "--out", dir.file("t.csv")}) ==
        cli::kExitConfig);
}

TEST_CASE("malformed traces exit with the trace code") {
  TempDir dir;
  const std::string trace_path = dir.file("broken.csv");
  {
    std::ofstream out(trace_path);
    out << "timestamp_s,src,dst,protocol,length_bytes\n"
        << "abc,bsf-1,nrf-1,TCP,100\n";
  }
  CHECK(cli::run({"analyze", trace_path, "--report-dir", dir.file("r")}) ==
        cli::kExitTrace);
  CHECK(cli::run({"analyze", dir.file("absent.csv"), "--report-dir",
                  dir.file("r")}) == cli::kExitTrace);
}

TEST_CASE("analyzing an empty trace succeeds with empty reports") {
  TempDir dir;
  const std::string trace_path = dir.file("empty.csv");
  {
    std::ofstream out(trace_path);
    out << "timestamp_s,src,dst,protocol,length_bytes\n";
  }
  const std::string report_dir = dir.file("reports");
  CHECK(cli::run({"analyze", trace_path, "--report-dir", report_dir}) ==
        cli::kExitOk);
  CHECK(read_file((fs::path(report_dir) / "protocol_counts.csv").string()) ==
        "protocol,count\n");
}

TEST_CASE("seed override changes timestamps but not exchange counts") {
  TempDir dir;
  const std::string config_path = dir.file("scenario.json");
  save_config_file(default_scenario(), config_path);

  const std::string t1 = dir.file("t1.csv");
  const std::string t2 = dir.file("t2.csv");
  REQUIRE(cli::run({"simulate", "--config", config_path, "--out", t1,
                    "--seed", "101"}) == cli::kExitOk);
  REQUIRE(cli::run({"simulate", "--config", config_path, "--out", t2,
                    "--seed", "202"}) == cli::kExitOk);

  const auto a = ingest_csv_file(t1);
  const auto b = ingest_csv_file(t2);
  CHECK(a.trace.records.size() == b.trace.records.size());
  CHECK(read_file(t1) != read_file(t2));
}

TEST_CASE("strict ingest surfaces unordered rows through the CLI") {
  TempDir dir;
  const std::string trace_path = dir.file("unordered.csv");
  {
    std::ofstream out(trace_path);
    out << "timestamp_s,src,dst,protocol,length_bytes\n"
        << "5,bsf-1,nrf-1,TCP,100\n"
        << "3,bsf-1,nrf-1,TCP,100\n";
  }
  CHECK(cli::run({"analyze", trace_path, "--report-dir", dir.file("r1")}) ==
        cli::kExitOk);
  CHECK(cli::run({"analyze", trace_path, "--report-dir", dir.file("r2"),
                  "--strict-ingest"}) == cli::kExitTrace);
}

TEST_CASE("unknown pair nodes exit with the config code") {
  TempDir dir;
  const std::string trace_path = dir.file("t.csv");
  {
    std::ofstream out(trace_path);
    out << "timestamp_s,src,dst,protocol,length_bytes\n"
        << "1,bsf-1,nrf-1,TCP,100\n";
  }
  CHECK(cli::run({"analyze", trace_path, "--report-dir", dir.file("r"),
                  "--pair", "bsf-1:ghost"}) == cli::kExitConfig);
  CHECK(cli::run({"analyze", trace_path, "--report-dir", dir.file("r"),
                  "--pair", "nonsense"}) == cli::kExitConfig);
}

TEST_CASE("environment variables override analytics thresholds") {
  ::setenv("NWDAF_PLACEMENT_LOW_BPS", "5", 1);
  ::setenv("NWDAF_SPIKE_SIGMA", "4.5", 1);
  const auto options = cli::options_from_env();
  CHECK(options.placement.low_rate_bps == 5.0);
  CHECK(options.events.spike_sigma == 4.5);
  ::unsetenv("NWDAF_PLACEMENT_LOW_BPS");
  ::unsetenv("NWDAF_SPIKE_SIGMA");
  const auto defaults = cli::options_from_env();
  CHECK(defaults.placement.low_rate_bps == 1000.0);
  CHECK(defaults.events.spike_sigma == 3.0);
}
