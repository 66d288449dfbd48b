#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "fyp/common/http.h"

namespace fyp::wire {

inline constexpr char kSigMainHeader[] = "X-FL-Sig-Main";
inline constexpr char kSigBodyHeader[] = "X-FL-Sig-Body";
inline constexpr char kKeyIdHeader[] = "X-FL-Key-Id";

// Identity and clock headers every platform request carries.
inline constexpr char kAccountHeader[] = "X-FL-Account-Id";
inline constexpr char kDeviceHeader[] = "X-FL-Device-Id";
inline constexpr char kTimestampHeader[] = "X-FL-Timestamp";

// Lower-cased names of the headers covered by sig_main. Headers outside
// this set (Host, User-Agent, ...) may be added or reordered freely.
inline constexpr std::string_view kSignedHeaderNames[] = {
    "content-type", "x-fl-account-id", "x-fl-device-id", "x-fl-timestamp"};

struct SigningKey {
  std::string key_id;
  std::string secret;
};

struct SignatureHeaders {
  std::string sig_main;
  std::string sig_body;
  std::string key_id;

  bool operator==(const SignatureHeaders&) const = default;
};

std::string HmacSha256Hex(std::string_view key, std::string_view data);

// METHOD \n target \n name:value lines (signed subset present in `headers`,
// sorted by lower-cased name) \n semicolon-joined signed names \n body digest.
std::string CanonicalRequest(std::string_view method, std::string_view path,
                             const Headers& headers, std::string_view body_digest);

SignatureHeaders SignRequest(std::string_view method, std::string_view path,
                             const Headers& headers, std::string_view body,
                             const SigningKey& key);

// Computes signatures for `request` and stores them in its headers,
// replacing any previous signature.
void SignInPlace(HttpRequest& request, const SigningKey& key);

enum class RejectReason {
  kNone,
  kMissingSignature,
  kUnknownKey,
  kBadBodyHash,
  kBadCanonicalHash,
};

const char* RejectReasonName(RejectReason reason);

struct Verification {
  RejectReason reason = RejectReason::kNone;
  std::string key_id;

  bool accepted() const { return reason == RejectReason::kNone; }
};

// Resolves a key id to its secret; nullopt for unknown ids.
using KeyLookup = std::function<std::optional<std::string>(std::string_view key_id)>;

Verification VerifyRequest(const HttpRequest& request, const KeyLookup& lookup);

}  // namespace fyp::wire
