#pragma once

#include <cstdint>
#include <fstream>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "fyp/common/http.h"

namespace fyp::proxy {

// One request/response pair as seen by the proxy. Bodies are byte-exact.
struct RecordedExchange {
  std::uint64_t sequence_no = 0;
  std::int64_t timestamp_ms = 0;
  std::string method;
  std::string path;
  Headers request_headers;
  std::string request_body;
  int response_status = 0;
  std::string response_body;

  HttpRequest Request() const { return {method, path, request_headers, request_body}; }

  bool operator==(const RecordedExchange&) const = default;
};

// Trace file layout:
//   "FLTRACE\0"  8-byte magic
//   u32 LE       format version (kTraceVersion)
//   records      u32 LE length, then an encoded RecordedExchange
// A text sidecar "<file>.idx" holds one line per record:
//   sequence_no \t offset \t length \t method \t path
inline constexpr std::string_view kTraceMagic{"FLTRACE\0", 8};
inline constexpr std::uint32_t kTraceVersion = 1;
inline constexpr std::size_t kTraceHeaderSize = 12;

std::string EncodeExchange(const RecordedExchange& exchange);
RecordedExchange DecodeExchange(std::string_view bytes, std::size_t base_offset = 0);

struct IndexEntry {
  std::uint64_t sequence_no = 0;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  std::string method;
  std::string path;

  bool operator==(const IndexEntry&) const = default;
};

// Append-only writer. Each Append flushes the record and its index line so
// a crash loses at most the record being written. Thread-safe.
class TraceWriter {
 public:
  // Creates (truncates) `path` and writes the header.
  explicit TraceWriter(std::string path);

  void Append(const RecordedExchange& exchange);
  const std::string& path() const { return path_; }
  std::size_t count() const;

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::ofstream data_;
  std::ofstream index_;
  std::uint64_t offset_ = kTraceHeaderSize;
  std::size_t count_ = 0;
};

// Parses a whole trace file from memory. Throws DecodeError (with the
// absolute file offset) on bad magic, unsupported version, or a truncated
// or malformed record.
std::vector<RecordedExchange> ParseTrace(std::string_view bytes);
std::vector<RecordedExchange> ReadTrace(const std::string& path);
// Serializes exchanges into the trace file format.
std::string SerializeTrace(const std::vector<RecordedExchange>& exchanges);
void WriteTrace(const std::string& path, const std::vector<RecordedExchange>& exchanges);

std::vector<IndexEntry> ReadIndex(const std::string& index_path);

}  // namespace fyp::proxy
