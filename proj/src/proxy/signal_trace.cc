#include "fyp/proxy/signal_trace.h"

#include "fyp/common/error.h"
#include "fyp/wire/endpoints.h"
#include "fyp/wire/messages.h"
#include "fyp/wire/signing.h"

namespace fyp::proxy {

bool IsSignalExchange(const RecordedExchange& e) {
  if (e.method != "POST") return false;
  const std::string path = PathWithoutQuery(e.path);
  if (path == wire::kFeedPath || path == wire::kFeedbackPath || path == wire::kAppLogPath) {
    return true;
  }
  if (path == wire::kStatsPath) {
    return wire::DecodeStats(e.request_body).origin == wire::VideoOrigin::kFyp;
  }
  return false;
}

SignalTrace ExtractTrace(const std::vector<RecordedExchange>& log,
                         const std::string& account_id) {
  SignalTrace trace;
  trace.account_id = account_id;
  bool seen = false;
  for (const auto& e : log) {
    auto account = FindHeader(e.request_headers, wire::kAccountHeader);
    if (!account || *account != account_id) continue;
    if (!seen) {
      trace.device_id = FindHeader(e.request_headers, wire::kDeviceHeader).value_or("");
      seen = true;
    }
    if (e.response_status < 200 || e.response_status >= 300) continue;
    if (IsSignalExchange(e)) trace.exchanges.push_back(e);
  }
  if (!seen) throw Error(ErrorCode::kNotFound, "no traffic from account '" + account_id + "'");
  return trace;
}

void SaveSignalTrace(const std::string& path, const SignalTrace& trace) {
  WriteTrace(path, trace.exchanges);
}

SignalTrace LoadSignalTrace(const std::string& path) {
  SignalTrace trace;
  trace.exchanges = ReadTrace(path);
  if (!trace.exchanges.empty()) {
    const auto& headers = trace.exchanges.front().request_headers;
    trace.account_id = FindHeader(headers, wire::kAccountHeader).value_or("");
    trace.device_id = FindHeader(headers, wire::kDeviceHeader).value_or("");
  }
  return trace;
}

}  // namespace fyp::proxy
