#include "fyp/common/http.h"

#include <algorithm>
#include <cctype>

#include "fyp/common/error.h"
#include "httplib.h"

namespace fyp {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kAuth: return "auth";
    case ErrorCode::kDecode: return "decode";
    case ErrorCode::kEncode: return "encode";
    case ErrorCode::kIntegrity: return "integrity";
    case ErrorCode::kInfrastructure: return "infrastructure";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kClassifier: return "classifier";
  }
  return "unknown";
}

namespace {

bool IEquals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::optional<std::string> FindHeader(const Headers& headers,
                                      std::string_view name) {
  for (const auto& [k, v] : headers) {
    if (IEquals(k, name)) return v;
  }
  return std::nullopt;
}

void SetHeader(Headers& headers, std::string_view name, std::string value) {
  for (auto& [k, v] : headers) {
    if (IEquals(k, name)) {
      v = std::move(value);
      return;
    }
  }
  headers.emplace_back(std::string(name), std::move(value));
}

void RemoveHeader(Headers& headers, std::string_view name) {
  std::erase_if(headers, [&](const auto& kv) { return IEquals(kv.first, name); });
}

std::string PathWithoutQuery(std::string_view target) {
  return std::string(target.substr(0, target.find('?')));
}

std::map<std::string, std::string> ParseQuery(std::string_view target) {
  std::map<std::string, std::string> out;
  auto q = target.find('?');
  if (q == std::string_view::npos) return out;
  std::string_view rest = target.substr(q + 1);
  while (!rest.empty()) {
    auto amp = rest.find('&');
    std::string_view pair = rest.substr(0, amp);
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) {
      out[PercentDecode(pair)] = "";
    } else {
      out[PercentDecode(pair.substr(0, eq))] = PercentDecode(pair.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
  return out;
}

std::string PercentEncode(std::string_view value) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(value.size());
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::string PercentDecode(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value[i] == '%' && i + 2 < value.size()) {
      int hi = HexValue(value[i + 1]);
      int lo = HexValue(value[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(value[i] == '+' ? ' ' : value[i]);
  }
  return out;
}

std::pair<std::string, int> ParseHostPort(std::string_view address) {
  std::string_view a = address;
  if (a.starts_with("http://")) a.remove_prefix(7);
  while (!a.empty() && a.back() == '/') a.remove_suffix(1);
  auto colon = a.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == a.size()) {
    throw Error(ErrorCode::kConfig,
                "expected host:port, got '" + std::string(address) + "'");
  }
  int port = 0;
  for (char c : a.substr(colon + 1)) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::kConfig, "bad port in '" + std::string(address) + "'");
    }
    port = port * 10 + (c - '0');
    if (port > 65535) {
      throw Error(ErrorCode::kConfig, "bad port in '" + std::string(address) + "'");
    }
  }
  return {std::string(a.substr(0, colon)), port};
}

struct HttpTransport::Impl {
  std::string host;
  int port;
  httplib::Client client;
  Impl(const std::string& h, int p) : host(h), port(p), client(h, p) {}
};

HttpTransport::HttpTransport(std::string address, int timeout_seconds) {
  auto [host, port] = ParseHostPort(address);
  impl_ = std::make_unique<Impl>(host, port);
  impl_->client.set_url_encode(false);
  impl_->client.set_keep_alive(true);
  impl_->client.set_tcp_nodelay(true);
  impl_->client.set_connection_timeout(timeout_seconds, 0);
  impl_->client.set_read_timeout(timeout_seconds, 0);
  impl_->client.set_write_timeout(timeout_seconds, 0);
}

HttpTransport::~HttpTransport() = default;

HttpResponse HttpTransport::RoundTrip(const HttpRequest& request) {
  httplib::Request req;
  req.method = request.method;
  req.path = request.path;
  for (const auto& [k, v] : request.headers) {
    // httplib computes these itself.
    if (IEquals(k, "Content-Length") || IEquals(k, "Host")) {
      continue;
    }
    req.headers.emplace(k, v);
  }
  req.body = request.body;
  if (!request.body.empty() && !req.has_header("Content-Type")) {
    req.headers.emplace("Content-Type", "application/octet-stream");
  }
  auto result = impl_->client.send(req);
  if (!result) {
    throw Error(ErrorCode::kInfrastructure,
                "HTTP " + request.method + " " + request.path + " to " +
                    impl_->host + ":" + std::to_string(impl_->port) +
                    " failed: " + httplib::to_string(result.error()));
  }
  HttpResponse out;
  out.status = result->status;
  for (const auto& [k, v] : result->headers) out.headers.emplace_back(k, v);
  out.body = result->body;
  return out;
}

}  // namespace fyp
