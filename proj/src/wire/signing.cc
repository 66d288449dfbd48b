#include "fyp/wire/signing.h"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <cctype>
#include <vector>

#include "fyp/common/error.h"

namespace fyp::wire {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool IsSigned(std::string_view lower_name) {
  return std::find(std::begin(kSignedHeaderNames), std::end(kSignedHeaderNames),
                   lower_name) != std::end(kSignedHeaderNames);
}

bool SameDigest(std::string_view a, std::string_view b) {
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace

std::string HmacSha256Hex(std::string_view key, std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
           reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest,
           &len) == nullptr) {
    throw Error(ErrorCode::kInfrastructure, "HMAC-SHA256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string CanonicalRequest(std::string_view method, std::string_view path,
                             const Headers& headers, std::string_view body_digest) {
  std::vector<std::pair<std::string, std::string>> signed_headers;
  for (const auto& [name, value] : headers) {
    std::string lower = Lower(name);
    if (IsSigned(lower)) signed_headers.emplace_back(std::move(lower), std::string(Trim(value)));
  }
  std::sort(signed_headers.begin(), signed_headers.end());

  std::string out;
  out.append(method).push_back('\n');
  out.append(path).push_back('\n');
  std::string names;
  for (const auto& [name, value] : signed_headers) {
    out.append(name).append(":").append(value).push_back('\n');
    if (!names.empty()) names.push_back(';');
    names += name;
  }
  out.append(names).push_back('\n');
  out.append(body_digest);
  return out;
}

SignatureHeaders SignRequest(std::string_view method, std::string_view path,
                             const Headers& headers, std::string_view body,
                             const SigningKey& key) {
  if (key.key_id.empty() || key.secret.empty()) {
    throw Error(ErrorCode::kConfig, "signing key is not configured");
  }
  SignatureHeaders sig;
  sig.key_id = key.key_id;
  sig.sig_body = HmacSha256Hex(key.secret, body);
  sig.sig_main = HmacSha256Hex(key.secret, CanonicalRequest(method, path, headers, sig.sig_body));
  return sig;
}

void SignInPlace(HttpRequest& request, const SigningKey& key) {
  auto sig = SignRequest(request.method, request.path, request.headers, request.body, key);
  SetHeader(request.headers, kKeyIdHeader, sig.key_id);
  SetHeader(request.headers, kSigBodyHeader, sig.sig_body);
  SetHeader(request.headers, kSigMainHeader, sig.sig_main);
}

const char* RejectReasonName(RejectReason reason) {
  switch (reason) {
    case RejectReason::kNone: return "accepted";
    case RejectReason::kMissingSignature: return "missing_signature";
    case RejectReason::kUnknownKey: return "unknown_key";
    case RejectReason::kBadBodyHash: return "bad_body_hash";
    case RejectReason::kBadCanonicalHash: return "bad_canonical_hash";
  }
  return "unknown";
}

Verification VerifyRequest(const HttpRequest& request, const KeyLookup& lookup) {
  Verification v;
  auto key_id = FindHeader(request.headers, kKeyIdHeader);
  auto sig_main = FindHeader(request.headers, kSigMainHeader);
  auto sig_body = FindHeader(request.headers, kSigBodyHeader);
  if (!key_id || !sig_main || !sig_body) {
    v.reason = RejectReason::kMissingSignature;
    return v;
  }
  v.key_id = *key_id;
  auto secret = lookup(*key_id);
  if (!secret || secret->empty()) {
    v.reason = RejectReason::kUnknownKey;
    return v;
  }
  const std::string body_digest = HmacSha256Hex(*secret, request.body);
  if (!SameDigest(body_digest, *sig_body)) {
    v.reason = RejectReason::kBadBodyHash;
    return v;
  }
  const std::string main_digest = HmacSha256Hex(
      *secret, CanonicalRequest(request.method, request.path, request.headers, body_digest));
  if (!SameDigest(main_digest, *sig_main)) {
    v.reason = RejectReason::kBadCanonicalHash;
    return v;
  }
  return v;
}

}  // namespace fyp::wire
