#include "petit/http_manager.hpp"

#include <httplib.h>

namespace petit {

HttpResponse HttpResponse::from_raw(int code, std::string raw_text) {
  HttpResponse r;
  r.code = code;
  r.raw_text = std::move(raw_text);
  r.body = parse_json(r.raw_text);
  if (r.body && r.body->is_object()) {
    if (const JsonValue* m = r.body->find("message"); m != nullptr && m->is_string()) {
      r.message = m->as_string();
    }
  }
  return r;
}

HttpClient::HttpClient(int timeout_seconds) : timeout_seconds_(timeout_seconds) {}

HttpResponse HttpClient::send(apostl::HttpMethod method, const std::string& absolute_url,
                              const std::optional<JsonValue>& body) {
  const auto scheme_end = absolute_url.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("URL '" + absolute_url + "' is not absolute");
  }
  const auto path_start = absolute_url.find('/', scheme_end + 3);
  const std::string origin =
      path_start == std::string::npos ? absolute_url : absolute_url.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : absolute_url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  client.set_follow_location(true);

  const httplib::Headers headers = {{"Accept", "application/json"}};
  httplib::Result result;
  const std::string payload = body ? to_wire(*body) : std::string{};
  switch (method) {
    case apostl::HttpMethod::Get:
      result = client.Get(path, headers);
      break;
    case apostl::HttpMethod::Post:
      result = client.Post(path, headers, payload, "application/json");
      break;
    case apostl::HttpMethod::Put:
      result = client.Put(path, headers, payload, "application/json");
      break;
    case apostl::HttpMethod::Delete:
      result = body ? client.Delete(path, headers, payload, "application/json")
                    : client.Delete(path, headers);
      break;
  }
  if (!result) {
    throw TransportError(httplib::to_string(result.error()) + " for " +
                         apostl::to_string(method) + " " + absolute_url);
  }
  return HttpResponse::from_raw(result->status, result->body);
}

}  // namespace petit
