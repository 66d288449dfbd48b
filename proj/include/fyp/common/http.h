#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fyp {

// Header list in wire order. Names compare case-insensitively on lookup but
// are stored exactly as sent so recorded traffic stays byte-exact.
using Headers = std::vector<std::pair<std::string, std::string>>;

std::optional<std::string> FindHeader(const Headers& headers,
                                      std::string_view name);
void SetHeader(Headers& headers, std::string_view name, std::string value);
void RemoveHeader(Headers& headers, std::string_view name);

struct HttpRequest {
  std::string method;
  // Request target: path plus optional "?query".
  std::string path;
  Headers headers;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  Headers headers;
  std::string body;
};

// Splits "a/b?x=1&y=2" into the path part and decoded query parameters.
std::string PathWithoutQuery(std::string_view target);
std::map<std::string, std::string> ParseQuery(std::string_view target);

std::string PercentEncode(std::string_view value);
std::string PercentDecode(std::string_view value);

// One request/response exchange with something that speaks the platform API:
// the platform itself, the recording proxy, or a remote server over HTTP.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse RoundTrip(const HttpRequest& request) = 0;
};

// Talks to a server over plain HTTP ("host:port" or "http://host:port").
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(std::string address, int timeout_seconds = 30);
  ~HttpTransport() override;

  HttpResponse RoundTrip(const HttpRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Parses "host:port", "http://host:port" into its parts. Throws on garbage.
std::pair<std::string, int> ParseHostPort(std::string_view address);

}  // namespace fyp
