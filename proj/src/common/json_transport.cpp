#include "moocaug/common/json_transport.hpp"

#include "httplib.h"

namespace moocaug {

HttpJsonTransport::HttpJsonTransport(std::string base_url, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  const auto scheme = base_url.find("://");
  const auto path_start =
      base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) {
    origin_ = std::move(base_url);
  } else {
    origin_ = base_url.substr(0, path_start);
    prefix_ = base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
}

Json HttpJsonTransport::post(const std::string& path, const Json& body) {
  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  auto res = client.Post(prefix_ + path, body.dump(), "application/json");
  if (!res) {
    throw TransportError(TransportErrc::kUnreachable,
                         origin_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError(TransportErrc::kHttpStatus,
                         origin_ + prefix_ + path + " answered " + std::to_string(res->status));
  }
  auto parsed = Json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) {
    throw TransportError(TransportErrc::kInvalidPayload, "response body is not JSON");
  }
  return parsed;
}

}  // namespace moocaug
