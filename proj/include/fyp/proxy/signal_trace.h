#pragma once

#include <string>
#include <vector>

#include "fyp/proxy/trace.h"

namespace fyp::proxy {

// The signal-bearing traffic of one account: the unit of cloning.
struct SignalTrace {
  std::string account_id;
  std::string device_id;
  std::vector<RecordedExchange> exchanges;

  bool operator==(const SignalTrace&) const = default;
};

// True for exchanges that carry FYP signals: scroll-mode feed requests,
// stats reports of FYP-origin videos, feedback, and app-log batches.
// Search, fetch-mode feed, registration and admin reads are not signals.
bool IsSignalExchange(const RecordedExchange& exchange);

// Keeps the successful signal exchanges sent by `account_id`, in sequence
// order. Throws Error(kNotFound) if the log holds no request from that
// account.
SignalTrace ExtractTrace(const std::vector<RecordedExchange>& log, const std::string& account_id);

// Trace files store only exchanges; identities come from the headers of
// the first exchange. An empty file yields an empty trace.
void SaveSignalTrace(const std::string& path, const SignalTrace& trace);
SignalTrace LoadSignalTrace(const std::string& path);

}  // namespace fyp::proxy
