#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fyp/classifier/classifier.h"
#include "fyp/common/error.h"
#include "fyp/common/http.h"
#include "fyp/platform/types.h"
#include "fyp/proxy/signal_trace.h"
#include "fyp/stats/stats.h"
#include "fyp/wire/compression.h"
#include "fyp/wire/messages.h"
#include "fyp/wire/signing.h"

namespace fyp::clone {

struct IdentityRewrite {
  std::string source_account_id;
  std::string source_device_id;
  // Key the trace was signed with; every exchange must verify under it.
  wire::SigningKey source_key;
  // Fresh account receiving the clone.
  wire::AccountCredentials target;
};

// Replaces every identity (body account/device ids, app-log event account
// ids, identity headers, key id) and re-signs each exchange with the target
// key. Non-identity fields, ordering and sequence numbers are preserved.
// Throws Error(kIntegrity) if an exchange fails source verification or if
// a source identity survives the rewrite.
proxy::SignalTrace RewriteTrace(const proxy::SignalTrace& trace, const IdentityRewrite& rewrite,
                                const wire::Dictionary& dictionary);

enum class Pacing { kNone, kRecorded, kScaled };

struct ReplayOptions {
  Pacing pacing = Pacing::kNone;
  // Wall-time multiplier on recorded gaps for kScaled (0.1 = 10x faster).
  double scale = 1.0;
};

struct ReplayReport {
  std::size_t sent = 0;
  std::size_t accepted = 0;
};

// Error raised when the platform rejects a replayed exchange.
class ReplayError : public Error {
 public:
  ReplayError(ErrorCode code, std::uint64_t sequence_no, const std::string& message)
      : Error(code, "replay rejected at sequence " + std::to_string(sequence_no) + ": " + message),
        sequence_no_(sequence_no) {}
  std::uint64_t sequence_no() const { return sequence_no_; }

 private:
  std::uint64_t sequence_no_;
};

// Sends the trace's requests in order. Any non-2xx response aborts with a
// ReplayError naming the offending sequence number.
ReplayReport Replay(const proxy::SignalTrace& trace, Transport& platform,
                    const ReplayOptions& options = {});

// Highest session nonce carried by a trace (0 for an empty trace). A client
// continuing a replayed account must start above it.
std::uint64_t MaxNonce(const proxy::SignalTrace& trace, const wire::Dictionary& dictionary);

struct AccountMeasurement {
  std::string account_id;
  std::string role;  // "original", "clone" or "baseline"
  std::uint64_t on_topic = 0;
  std::uint64_t fetched = 0;
  stats::Interval interval;
  std::string digest_before;
  std::string digest_after;
};

struct FailingPair {
  std::string a;
  std::string b;
  std::string reason;
};

struct CloneVerdict {
  std::string topic_id;
  double confidence = 0.99;
  std::vector<AccountMeasurement> accounts;
  // overlaps[i][j]: intervals of accounts[i] and accounts[j] intersect.
  std::vector<std::vector<bool>> overlaps;
  bool pass = false;
  std::vector<FailingPair> failing;
  // Every account's state digest was unchanged by the fetches.
  bool state_unchanged = true;

  std::string ToJson() const;
};

struct VerifyOptions {
  std::uint32_t fetch_count = 200;
  double confidence = 0.99;
  // Fetch cursor; distinct cursors give independent samples.
  std::uint64_t cursor = 0;
};

// Fetch-mode sample per account, Agresti-Coull intervals, and the verdict:
// pass iff every clone overlaps the original and no clone overlaps any
// baseline.
CloneVerdict VerifyClones(Transport& platform, const wire::AccountCredentials& original,
                          const std::vector<wire::AccountCredentials>& clones,
                          const std::vector<wire::AccountCredentials>& baselines,
                          const platform::TopicProfile& topic,
                          classifier::Classifier& classifier, const VerifyOptions& options = {});

}  // namespace fyp::clone
