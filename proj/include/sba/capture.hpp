#pragma once

// Trace acquisition: the in-simulation tap that records every exchanged
// message, plus CSV ingestion/export.
//
// CSV format (bit-exact): header `timestamp_s,src,dst,protocol,length_bytes`,
// UTF-8, LF line endings, '.' decimal separator. Optional metadata lines
// prefixed with '#' may carry duration and topology hints
// (`# duration_s=...`, `# node=<name>:<type>`, `# link=<a>:<b>`); strict
// parsers skip them.

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sba/model.hpp"

namespace sba {

/// A message visible to the capture tap: resolvable endpoints, a protocol
/// label, and a serialized size.
struct TapMessage {
  std::string src;
  std::string dst;
  Protocol protocol;
  std::size_t size_estimate = 0;
};

/// Collects PacketRecords from the event loop. Written to by a single
/// thread; finalize() produces a validated Trace.
class TraceTap {
 public:
  PacketRecord tap(const TapMessage& message, double now);

  std::size_t record_count() const { return records_.size(); }
  const std::vector<PacketRecord>& records() const { return records_; }

  /// Stable-sorts by timestamp and returns the trace.
  Trace finalize(double duration_s,
                 std::optional<Topology> topology = std::nullopt);

 private:
  std::vector<PacketRecord> records_;
};

class IngestError : public std::runtime_error {
 public:
  IngestError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct IngestOptions {
  /// Strict mode rejects out-of-order rows and skips metadata lines instead
  /// of honoring them.
  bool strict = false;
};

struct IngestResult {
  Trace trace;
  std::size_t reorder_warnings = 0;  // rows that arrived out of order
};

/// Parses the CSV format. Throws IngestError naming the offending line for
/// malformed input; an empty file with only the header yields an empty trace.
IngestResult ingest_csv(std::istream& source, const IngestOptions& options = {});
IngestResult ingest_csv_file(const std::string& path,
                             const IngestOptions& options = {});

/// Writes the CSV form. ingest_csv(export_csv(t)) reproduces t
/// record-for-record. Field values must not contain ',' or line breaks.
void export_csv(const Trace& trace, std::ostream& sink);
void export_csv_file(const Trace& trace, const std::string& path);

/// Shortest decimal form that round-trips the exact double (locale-free).
std::string format_double(double value);

}  // namespace sba
