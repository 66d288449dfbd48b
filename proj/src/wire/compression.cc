#include "fyp/wire/compression.h"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "fyp/common/error.h"

namespace fyp::wire {
namespace {

// zlib's window; anything earlier in a preset dictionary is unreachable.
constexpr std::size_t kMaxDictionary = 32 * 1024;

std::uint32_t Adler(std::string_view bytes) {
  uLong a = adler32(0L, Z_NULL, 0);
  return static_cast<std::uint32_t>(
      adler32(a, reinterpret_cast<const Bytef*>(bytes.data()),
              static_cast<uInt>(bytes.size())));
}

}  // namespace

Dictionary Dictionary::FromBytes(std::string raw) {
  if (raw.empty()) throw Error(ErrorCode::kConfig, "compression dictionary is empty");
  if (raw.size() > kMaxDictionary) {
    raw.erase(0, raw.size() - kMaxDictionary);
  }
  auto id = Adler(raw);
  return Dictionary(std::move(raw), id);
}

Dictionary Dictionary::Parse(std::string_view file_bytes) {
  if (file_bytes.size() < kMagic.size() || file_bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorCode::kConfig, "dictionary file lacks FLDICT01 magic");
  }
  return FromBytes(std::string(file_bytes.substr(kMagic.size())));
}

Dictionary Dictionary::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open dictionary file " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Parse(data);
}

std::string Dictionary::Serialize() const {
  std::string out(kMagic);
  out += bytes_;
  return out;
}

void Dictionary::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write dictionary file " + path);
  std::string data = Serialize();
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kConfig, "short write to " + path);
}

Dictionary BuildDictionary(const std::vector<std::string>& samples, std::size_t max_size) {
  max_size = std::min(max_size, kMaxDictionary);
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> first_seen;
  for (const auto& s : samples) {
    if (s.empty()) continue;
    if (counts[s]++ == 0) first_seen.push_back(s);
  }
  if (first_seen.empty()) {
    throw Error(ErrorCode::kConfig, "cannot build a dictionary from empty samples");
  }
  // Least valuable first; stable so ties keep first-seen order.
  std::stable_sort(first_seen.begin(), first_seen.end(),
                   [&](const std::string& a, const std::string& b) {
                     return counts[a] * a.size() < counts[b] * b.size();
                   });
  std::string dict;
  for (const auto& s : first_seen) dict += s;
  if (dict.size() > max_size) dict.erase(0, dict.size() - max_size);
  return Dictionary::FromBytes(std::move(dict));
}

std::string CompressPayload(std::string_view plain, const Dictionary& dictionary) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, 15, 9, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::kEncode, "deflateInit failed");
  }
  const auto& dict = dictionary.bytes();
  if (deflateSetDictionary(&zs, reinterpret_cast<const Bytef*>(dict.data()),
                           static_cast<uInt>(dict.size())) != Z_OK) {
    deflateEnd(&zs);
    throw Error(ErrorCode::kEncode, "deflateSetDictionary failed");
  }
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(plain.size())) + 16);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(plain.data()));
  zs.avail_in = static_cast<uInt>(plain.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorCode::kEncode, "deflate did not finish");
  out.resize(zs.total_out);
  return out;
}

std::string DecompressPayload(std::string_view compressed, const Dictionary& dictionary,
                              std::size_t max_output) {
  z_stream zs{};
  if (inflateInit2(&zs, 15) != Z_OK) {
    throw Error(ErrorCode::kDecode, "inflateInit failed");
  }
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  std::string out;
  char chunk[16384];
  bool dictionary_used = false;
  for (;;) {
    zs.next_out = reinterpret_cast<Bytef*>(chunk);
    zs.avail_out = sizeof(chunk);
    int rc = inflate(&zs, Z_NO_FLUSH);
    if (rc == Z_NEED_DICT) {
      if (zs.adler != dictionary.id()) {
        inflateEnd(&zs);
        throw Error(ErrorCode::kDecode, "payload was compressed with a different dictionary");
      }
      const auto& dict = dictionary.bytes();
      rc = inflateSetDictionary(&zs, reinterpret_cast<const Bytef*>(dict.data()),
                                static_cast<uInt>(dict.size()));
      if (rc != Z_OK) {
        inflateEnd(&zs);
        throw Error(ErrorCode::kDecode, "dictionary rejected by stream");
      }
      dictionary_used = true;
      continue;
    }
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(ErrorCode::kDecode,
                  std::string("corrupt compressed payload: ") + (zs.msg ? zs.msg : "inflate error"));
    }
    out.append(chunk, sizeof(chunk) - zs.avail_out);
    if (out.size() > max_output) {
      inflateEnd(&zs);
      throw Error(ErrorCode::kDecode, "decompressed payload exceeds limit");
    }
    if (rc == Z_STREAM_END) break;
    if (zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw Error(ErrorCode::kDecode, "truncated compressed payload");
    }
  }
  const bool trailing = zs.avail_in != 0;
  inflateEnd(&zs);
  if (trailing) throw Error(ErrorCode::kDecode, "trailing bytes after compressed payload");
  if (!dictionary_used) {
    throw Error(ErrorCode::kDecode, "payload was not compressed with a shared dictionary");
  }
  return out;
}

}  // namespace fyp::wire
