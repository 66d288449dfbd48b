#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fyp {

// Coarse failure classes. The CLI maps these onto process exit codes.
enum class ErrorCode {
  kConfig,
  kProtocol,
  kAuth,
  kDecode,
  kEncode,
  kIntegrity,
  kInfrastructure,
  kDegenerate,
  kNotFound,
  kClassifier,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the TLV reader; `offset` is the byte position where decoding
// stopped making sense.
class DecodeError : public Error {
 public:
  DecodeError(std::size_t offset, const std::string& message)
      : Error(ErrorCode::kDecode,
              message + " at byte offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace fyp
