#include "sba/capture.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <system_error>

namespace sba {

namespace {

constexpr std::string_view kHeader = "timestamp_s,src,dst,protocol,length_bytes";

std::optional<double> parse_full_double(std::string_view text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::optional<std::uint64_t> parse_full_u64(std::string_view text) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

void check_field_exportable(const std::string& value) {
  if (value.find_first_of(",\n\r") != std::string::npos) {
    throw std::invalid_argument("field contains ',' or line break: " + value);
  }
}

// Metadata lines look like `# key=value`; unknown keys are ignored.
std::optional<std::pair<std::string, std::string>> parse_metadata(
    std::string_view line) {
  std::string_view body = line.substr(1);
  while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
  auto eq = body.find('=');
  if (eq == std::string_view::npos) return std::nullopt;
  return std::make_pair(std::string(body.substr(0, eq)),
                        std::string(body.substr(eq + 1)));
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

PacketRecord TraceTap::tap(const TapMessage& message, double now) {
  PacketRecord record;
  record.timestamp_s = now;
  record.src = message.src;
  record.dst = message.dst;
  record.protocol = message.protocol;
  record.length_bytes = static_cast<std::uint32_t>(
      std::max<std::size_t>(message.size_estimate, 1));
  records_.push_back(record);
  return record;
}

Trace TraceTap::finalize(double duration_s, std::optional<Topology> topology) {
  Trace trace;
  trace.records = records_;
  std::stable_sort(trace.records.begin(), trace.records.end(),
                   [](const PacketRecord& a, const PacketRecord& b) {
                     return a.timestamp_s < b.timestamp_s;
                   });
  trace.duration_s = duration_s;
  trace.topology = std::move(topology);
  return trace;
}

IngestResult ingest_csv(std::istream& source, const IngestOptions& options) {
  IngestResult result;
  std::optional<double> duration_override;
  Topology topology_hint;

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  double last_ts = 0.0;

  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') {
      if (options.strict) continue;
      if (auto meta = parse_metadata(line)) {
        const auto& [key, value] = *meta;
        if (key == "duration_s") {
          if (auto d = parse_full_double(value)) duration_override = *d;
        } else if (key == "node") {
          auto colon = value.find(':');
          if (colon != std::string::npos) {
            topology_hint.nodes.emplace_back(
                value.substr(0, colon), NfType::parse(value.substr(colon + 1)));
          }
        } else if (key == "link") {
          auto colon = value.find(':');
          if (colon != std::string::npos) {
            topology_hint.links.emplace_back(value.substr(0, colon),
                                             value.substr(colon + 1));
          }
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) {
        throw IngestError(line_no, "missing header '" + std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    std::array<std::string_view, 5> fields;
    std::string_view rest = line;
    for (std::size_t i = 0; i < 5; ++i) {
      auto comma = rest.find(',');
      if (i < 4) {
        if (comma == std::string_view::npos) {
          throw IngestError(line_no, "expected 5 fields");
        }
        fields[i] = rest.substr(0, comma);
        rest.remove_prefix(comma + 1);
      } else {
        if (comma != std::string_view::npos) {
          throw IngestError(line_no, "expected 5 fields");
        }
        fields[i] = rest;
      }
    }

    PacketRecord record;
    auto ts = parse_full_double(fields[0]);
    if (!ts) throw IngestError(line_no, "timestamp_s not numeric");
    if (*ts < 0) throw IngestError(line_no, "timestamp_s must be >= 0");
    record.timestamp_s = *ts;

    if (fields[1].empty()) throw IngestError(line_no, "src empty");
    if (fields[2].empty()) throw IngestError(line_no, "dst empty");
    if (fields[1] == fields[2]) {
      throw IngestError(line_no, "src and dst identical");
    }
    record.src = std::string(fields[1]);
    record.dst = std::string(fields[2]);
    record.protocol = parse_protocol(fields[3]);

    auto length = parse_full_u64(fields[4]);
    if (!length) throw IngestError(line_no, "length_bytes not numeric");
    if (*length < 1) throw IngestError(line_no, "length_bytes must be >= 1");
    if (*length > std::numeric_limits<std::uint32_t>::max()) {
      throw IngestError(line_no, "length_bytes out of range");
    }
    record.length_bytes = static_cast<std::uint32_t>(*length);

    if (!result.trace.records.empty() && record.timestamp_s < last_ts) {
      if (options.strict) {
        throw IngestError(line_no, "out of order timestamp");
      }
      ++result.reorder_warnings;
    }
    last_ts = record.timestamp_s;
    result.trace.records.push_back(std::move(record));
  }

  if (!header_seen) throw IngestError(1, "missing header '" + std::string(kHeader) + "'");

  if (result.reorder_warnings > 0) {
    std::stable_sort(result.trace.records.begin(), result.trace.records.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                       return a.timestamp_s < b.timestamp_s;
                     });
  }

  const double last = result.trace.records.empty()
                          ? 0.0
                          : result.trace.records.back().timestamp_s;
  result.trace.duration_s = duration_override.value_or(last);
  if (result.trace.duration_s < last) {
    throw IngestError(line_no, "duration_s metadata less than last timestamp");
  }
  if (!topology_hint.nodes.empty()) {
    result.trace.topology = std::move(topology_hint);
  }
  return result;
}

IngestResult ingest_csv_file(const std::string& path,
                             const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return ingest_csv(in, options);
}

void export_csv(const Trace& trace, std::ostream& sink) {
  const double last =
      trace.records.empty() ? 0.0 : trace.records.back().timestamp_s;
  if (trace.duration_s != last) {
    sink << "# duration_s=" << format_double(trace.duration_s) << '\n';
  }
  if (trace.topology) {
    for (const auto& [name, type] : trace.topology->nodes) {
      check_field_exportable(name);
      sink << "# node=" << name << ':' << type.label() << '\n';
    }
    for (const auto& [a, b] : trace.topology->links) {
      sink << "# link=" << a << ':' << b << '\n';
    }
  }
  sink << kHeader << '\n';
  for (const auto& r : trace.records) {
    check_field_exportable(r.src);
    check_field_exportable(r.dst);
    const std::string protocol = r.protocol.label();
    check_field_exportable(protocol);
    sink << format_double(r.timestamp_s) << ',' << r.src << ',' << r.dst << ','
         << protocol << ',' << r.length_bytes << '\n';
  }
  if (!sink) throw std::runtime_error("trace export failed: sink write error");
}

void export_csv_file(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  export_csv(trace, out);
  out.flush();
  if (!out) throw std::runtime_error("trace export failed: " + path);
}

}  // namespace sba
