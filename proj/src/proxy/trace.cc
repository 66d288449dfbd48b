#include "fyp/proxy/trace.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fyp/common/error.h"
#include "fyp/wire/proto.h"

namespace fyp::proxy {
namespace {

void AppendU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t ReadU32(std::string_view bytes, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  return v;
}

std::string FileHeader() {
  std::string header(kTraceMagic);
  AppendU32(header, kTraceVersion);
  return header;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open trace " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string EncodeExchange(const RecordedExchange& e) {
  wire::ProtoWriter w;
  w.WriteVarint(1, e.sequence_no);
  w.WriteVarint(2, static_cast<std::uint64_t>(e.timestamp_ms));
  w.WriteBytes(3, e.method);
  w.WriteBytes(4, e.path);
  for (const auto& [name, value] : e.request_headers) {
    wire::ProtoWriter h;
    h.WriteBytes(1, name);
    h.WriteBytes(2, value);
    w.WriteMessage(5, h);
  }
  w.WriteBytesIfSet(6, e.request_body);
  w.WriteVarint(7, static_cast<std::uint64_t>(e.response_status));
  w.WriteBytesIfSet(8, e.response_body);
  return w.Release();
}

RecordedExchange DecodeExchange(std::string_view bytes, std::size_t base_offset) {
  RecordedExchange e;
  wire::ProtoReader r(bytes, base_offset);
  while (r.Next()) {
    switch (r.field()) {
      case 1: e.sequence_no = r.ReadVarint(); break;
      case 2: e.timestamp_ms = static_cast<std::int64_t>(r.ReadVarint()); break;
      case 3: e.method = r.ReadString(); break;
      case 4: e.path = r.ReadString(); break;
      case 5: {
        auto h = r.ReadMessage();
        std::pair<std::string, std::string> kv;
        while (h.Next()) {
          if (h.field() == 1) {
            kv.first = h.ReadString();
          } else if (h.field() == 2) {
            kv.second = h.ReadString();
          } else {
            h.Skip();
          }
        }
        e.request_headers.push_back(std::move(kv));
        break;
      }
      case 6: e.request_body = r.ReadString(); break;
      case 7: e.response_status = static_cast<int>(r.ReadVarint()); break;
      case 8: e.response_body = r.ReadString(); break;
      default: r.Skip();
    }
  }
  return e;
}

TraceWriter::TraceWriter(std::string path) : path_(std::move(path)) {
  auto parent = std::filesystem::path(path_).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  data_.open(path_, std::ios::binary | std::ios::trunc);
  index_.open(path_ + ".idx", std::ios::trunc);
  if (!data_ || !index_) {
    throw Error(ErrorCode::kInfrastructure, "cannot create trace file " + path_);
  }
  data_ << FileHeader();
  data_.flush();
  index_.flush();
}

void TraceWriter::Append(const RecordedExchange& exchange) {
  std::string record = EncodeExchange(exchange);
  std::string framed;
  AppendU32(framed, static_cast<std::uint32_t>(record.size()));
  framed += record;
  std::lock_guard lock(mu_);
  data_.write(framed.data(), static_cast<std::streamsize>(framed.size()));
  data_.flush();
  index_ << exchange.sequence_no << '\t' << offset_ << '\t' << framed.size() << '\t'
         << exchange.method << '\t' << exchange.path << '\n';
  index_.flush();
  if (!data_ || !index_) throw Error(ErrorCode::kInfrastructure, "write failed on " + path_);
  offset_ += framed.size();
  ++count_;
}

std::size_t TraceWriter::count() const {
  std::lock_guard lock(mu_);
  return count_;
}

std::vector<RecordedExchange> ParseTrace(std::string_view bytes) {
  if (bytes.size() < kTraceHeaderSize) {
    throw DecodeError(bytes.size(), "trace shorter than its header");
  }
  if (bytes.substr(0, kTraceMagic.size()) != kTraceMagic) {
    throw DecodeError(0, "bad trace magic");
  }
  std::uint32_t version = ReadU32(bytes, kTraceMagic.size());
  if (version != kTraceVersion) {
    throw DecodeError(kTraceMagic.size(),
                      "unsupported trace version " + std::to_string(version));
  }
  std::vector<RecordedExchange> out;
  std::size_t pos = kTraceHeaderSize;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 4) throw DecodeError(pos, "truncated record length");
    std::uint32_t len = ReadU32(bytes, pos);
    if (bytes.size() - pos - 4 < len) throw DecodeError(pos, "truncated record");
    out.push_back(DecodeExchange(bytes.substr(pos + 4, len), pos + 4));
    if (!out.empty() && out.size() > 1 &&
        out.back().sequence_no <= out[out.size() - 2].sequence_no) {
      throw DecodeError(pos, "sequence numbers not increasing");
    }
    pos += 4 + len;
  }
  return out;
}

std::vector<RecordedExchange> ReadTrace(const std::string& path) {
  return ParseTrace(ReadFile(path));
}

std::string SerializeTrace(const std::vector<RecordedExchange>& exchanges) {
  std::string out = FileHeader();
  for (const auto& e : exchanges) {
    std::string record = EncodeExchange(e);
    AppendU32(out, static_cast<std::uint32_t>(record.size()));
    out += record;
  }
  return out;
}

void WriteTrace(const std::string& path, const std::vector<RecordedExchange>& exchanges) {
  TraceWriter writer(path);
  for (const auto& e : exchanges) writer.Append(e);
}

std::vector<IndexEntry> ReadIndex(const std::string& index_path) {
  std::istringstream in(ReadFile(index_path));
  std::vector<IndexEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    IndexEntry e;
    std::string seq, off, len;
    if (!std::getline(fields, seq, '\t') || !std::getline(fields, off, '\t') ||
        !std::getline(fields, len, '\t') || !std::getline(fields, e.method, '\t') ||
        !std::getline(fields, e.path)) {
      throw Error(ErrorCode::kDecode, "malformed index line: " + line);
    }
    e.sequence_no = std::stoull(seq);
    e.offset = std::stoull(off);
    e.length = std::stoull(len);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace fyp::proxy
