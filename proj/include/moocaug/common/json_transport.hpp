#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/common/error.hpp"

namespace moocaug {

enum class TransportErrc {
  kUnreachable,     // connection failed or timed out
  kHttpStatus,      // server answered with a non-2xx status
  kInvalidPayload,  // body is not JSON
};

using TransportError = CodedError<TransportErrc>;

// Request/response JSON exchange with an external model service.
class JsonTransport {
 public:
  virtual ~JsonTransport() = default;
  virtual Json post(const std::string& path, const Json& body) = 0;
};

// JSON over HTTP POST. `base_url` is scheme://host[:port][/prefix].
class HttpJsonTransport : public JsonTransport {
 public:
  explicit HttpJsonTransport(std::string base_url,
                             std::chrono::milliseconds timeout = std::chrono::seconds(30));
  Json post(const std::string& path, const Json& body) override;

 private:
  std::string origin_;
  std::string prefix_;
  std::chrono::milliseconds timeout_;
};

}  // namespace moocaug
