#include "fyp/wire/proto.h"

#include "fyp/common/error.h"

namespace fyp::wire {

void AppendVarint(std::string& out, std::uint64_t value) {
  while (value >= 0x80) {
    out.push_back(static_cast<char>((value & 0x7F) | 0x80));
    value >>= 7;
  }
  out.push_back(static_cast<char>(value));
}

std::size_t VarintSize(std::uint64_t value) {
  std::size_t n = 1;
  while (value >= 0x80) {
    value >>= 7;
    ++n;
  }
  return n;
}

void ProtoWriter::WriteTag(std::uint32_t field, WireType type) {
  AppendVarint(buffer_, (static_cast<std::uint64_t>(field) << 3) |
                            static_cast<std::uint64_t>(type));
}

void ProtoWriter::WriteVarint(std::uint32_t field, std::uint64_t value) {
  WriteTag(field, WireType::kVarint);
  AppendVarint(buffer_, value);
}

void ProtoWriter::WriteBytes(std::uint32_t field, std::string_view bytes) {
  WriteTag(field, WireType::kLengthDelimited);
  AppendVarint(buffer_, bytes.size());
  buffer_.append(bytes);
}

std::uint64_t ProtoReader::RawVarint() {
  std::uint64_t value = 0;
  const std::size_t start = pos_;
  for (std::size_t i = 0; i < kMaxVarintBytes; ++i) {
    if (pos_ >= data_.size()) {
      throw DecodeError(base_ + start, "truncated varint");
    }
    const auto byte = static_cast<std::uint8_t>(data_[pos_++]);
    if (i == 9 && byte > 1) {
      throw DecodeError(base_ + start, "varint overflows 64 bits");
    }
    value |= static_cast<std::uint64_t>(byte & 0x7F) << (7 * i);
    if ((byte & 0x80) == 0) return value;
  }
  throw DecodeError(base_ + start, "varint longer than 10 bytes");
}

bool ProtoReader::Next() {
  if (!consumed_) Skip();
  if (pos_ >= data_.size()) return false;
  tag_pos_ = pos_;
  const std::uint64_t tag = RawVarint();
  const std::uint64_t field = tag >> 3;
  const auto type = static_cast<std::uint8_t>(tag & 0x7);
  if (field == 0 || field > 0x1FFFFFFF) {
    throw DecodeError(base_ + tag_pos_, "invalid field number");
  }
  if (type != 0 && type != 1 && type != 2 && type != 5) {
    throw DecodeError(base_ + tag_pos_,
                      "unsupported wire type " + std::to_string(type));
  }
  field_ = static_cast<std::uint32_t>(field);
  type_ = static_cast<WireType>(type);
  consumed_ = false;
  return true;
}

void ProtoReader::Expect(WireType type) {
  if (consumed_) {
    throw DecodeError(base_ + pos_, "field value already consumed");
  }
  if (type_ != type) {
    throw DecodeError(base_ + tag_pos_,
                      "field " + std::to_string(field_) + " has wire type " +
                          std::to_string(static_cast<int>(type_)) +
                          ", expected " + std::to_string(static_cast<int>(type)));
  }
  consumed_ = true;
}

std::uint64_t ProtoReader::ReadVarint() {
  Expect(WireType::kVarint);
  return RawVarint();
}

std::string_view ProtoReader::ReadBytes() {
  Expect(WireType::kLengthDelimited);
  const std::size_t len_pos = pos_;
  const std::uint64_t len = RawVarint();
  if (len > data_.size() - pos_) {
    throw DecodeError(base_ + len_pos, "length-delimited field runs past end (" +
                                           std::to_string(len) + " bytes declared)");
  }
  std::string_view out = data_.substr(pos_, len);
  pos_ += len;
  return out;
}

ProtoReader ProtoReader::ReadMessage() {
  const std::size_t len_pos = pos_;
  std::string_view bytes = ReadBytes();
  return ProtoReader(bytes, base_ + len_pos + VarintSize(bytes.size()));
}

void ProtoReader::Skip() {
  if (consumed_) return;
  switch (type_) {
    case WireType::kVarint:
      ReadVarint();
      return;
    case WireType::kLengthDelimited:
      ReadBytes();
      return;
    case WireType::kFixed64:
    case WireType::kFixed32: {
      const std::size_t width = type_ == WireType::kFixed64 ? 8 : 4;
      if (data_.size() - pos_ < width) {
        throw DecodeError(base_ + pos_, "truncated fixed-width field");
      }
      pos_ += width;
      consumed_ = true;
      return;
    }
  }
}

}  // namespace fyp::wire
