#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "petit/apostl_ast.hpp"
#include "petit/json_value.hpp"

namespace petit {

/// Normalized HTTP response. `body` is present iff the raw text parses as
/// JSON; `message` is lifted from a top-level "message" field when there is
/// one.
struct HttpResponse {
  int code = 0;
  std::optional<JsonValue> body;
  std::string raw_text;
  std::optional<std::string> message;

  static HttpResponse from_raw(int code, std::string raw_text);
};

/// Connection-level failure, distinct from any HTTP status.
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& reason)
      : std::runtime_error("transport failure: " + reason) {}
};

/// Request-sending capability used by evaluation and the test engine.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(apostl::HttpMethod method, const std::string& absolute_url,
                            const std::optional<JsonValue>& body) = 0;
};

/// HTTP/1.1 client over TCP. Sends Accept/Content-Type: application/json,
/// follows at most 5 redirects, and times out instead of hanging.
class HttpClient : public Transport {
 public:
  explicit HttpClient(int timeout_seconds = 10);

  HttpResponse send(apostl::HttpMethod method, const std::string& absolute_url,
                    const std::optional<JsonValue>& body) override;

 private:
  int timeout_seconds_;
};

}  // namespace petit
