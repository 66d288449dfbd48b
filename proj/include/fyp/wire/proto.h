#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace fyp::wire {

// Protobuf-compatible wire types. Only varint and length-delimited are
// emitted; fixed32/fixed64 are understood so unknown fields can be skipped.
enum class WireType : std::uint8_t {
  kVarint = 0,
  kFixed64 = 1,
  kLengthDelimited = 2,
  kFixed32 = 5,
};

constexpr std::size_t kMaxVarintBytes = 10;

void AppendVarint(std::string& out, std::uint64_t value);
std::size_t VarintSize(std::uint64_t value);

class ProtoWriter {
 public:
  void WriteVarint(std::uint32_t field, std::uint64_t value);
  void WriteBool(std::uint32_t field, bool value) { WriteVarint(field, value ? 1 : 0); }
  void WriteBytes(std::uint32_t field, std::string_view bytes);
  void WriteMessage(std::uint32_t field, const ProtoWriter& message) {
    WriteBytes(field, message.bytes());
  }

  // proto3-style: default values are omitted.
  void WriteVarintIfSet(std::uint32_t field, std::uint64_t value) {
    if (value != 0) WriteVarint(field, value);
  }
  void WriteBytesIfSet(std::uint32_t field, std::string_view bytes) {
    if (!bytes.empty()) WriteBytes(field, bytes);
  }

  const std::string& bytes() const { return buffer_; }
  std::string Release() { return std::move(buffer_); }

 private:
  void WriteTag(std::uint32_t field, WireType type);

  std::string buffer_;
};

// Pull reader over an encoded message. Typical use:
//
//   ProtoReader r(bytes);
//   while (r.Next()) {
//     switch (r.field()) {
//       case 1: id = r.ReadString(); break;
//       default: r.Skip();
//     }
//   }
//
// All failures throw DecodeError carrying the absolute byte offset.
class ProtoReader {
 public:
  explicit ProtoReader(std::string_view data, std::size_t base_offset = 0)
      : data_(data), base_(base_offset) {}

  bool Next();

  std::uint32_t field() const { return field_; }
  WireType wire_type() const { return type_; }
  // Absolute offset of the current field's tag.
  std::size_t tag_offset() const { return base_ + tag_pos_; }

  std::uint64_t ReadVarint();
  bool ReadBool() { return ReadVarint() != 0; }
  std::string_view ReadBytes();
  std::string ReadString() { return std::string(ReadBytes()); }
  ProtoReader ReadMessage();
  void Skip();

 private:
  std::uint64_t RawVarint();
  void Expect(WireType type);

  std::string_view data_;
  std::size_t base_;
  std::size_t pos_ = 0;
  std::size_t tag_pos_ = 0;
  std::uint32_t field_ = 0;
  WireType type_ = WireType::kVarint;
  bool consumed_ = true;
};

}  // namespace fyp::wire
