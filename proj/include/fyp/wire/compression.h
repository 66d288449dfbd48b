#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fyp::wire {

// Shared compression dictionary for app-log payloads. On disk it is the
// 8-byte magic "FLDICT01" followed by the raw dictionary bytes.
class Dictionary {
 public:
  static constexpr std::string_view kMagic{"FLDICT01", 8};

  static Dictionary FromBytes(std::string raw);
  static Dictionary Load(const std::string& path);
  static Dictionary Parse(std::string_view file_bytes);

  void Save(const std::string& path) const;
  std::string Serialize() const;

  const std::string& bytes() const { return bytes_; }
  // Adler-32 of the dictionary; the same id zlib embeds in the stream header.
  std::uint32_t id() const { return id_; }

 private:
  Dictionary(std::string bytes, std::uint32_t id) : bytes_(std::move(bytes)), id_(id) {}

  std::string bytes_;
  std::uint32_t id_;
};

// Builds a dictionary from representative payloads. Distinct samples are
// ranked by total bytes they account for and concatenated with the most
// valuable last (deflate references closer content more cheaply), then
// trimmed from the front to `max_size`.
Dictionary BuildDictionary(const std::vector<std::string>& samples,
                           std::size_t max_size = 16 * 1024);

std::string CompressPayload(std::string_view plain, const Dictionary& dictionary);

// Throws Error(kDecode) on a corrupt stream or a dictionary mismatch.
std::string DecompressPayload(std::string_view compressed,
                              const Dictionary& dictionary,
                              std::size_t max_output = 64u << 20);

}  // namespace fyp::wire
