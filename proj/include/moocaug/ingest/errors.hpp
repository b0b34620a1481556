#pragma once

#include <cstddef>
#include <string>

#include "moocaug/common/error.hpp"

namespace moocaug::ingest {

enum class IngestErrc {
  kMalformedTimestamp,
  kEmptyFile,
  kUnknownFormat,
  kInvalidEncoding,
  kNoFrames,
  kCorruptImage,
  kSchemaViolation,
  kIo,
};

class IngestError : public CodedError<IngestErrc> {
 public:
  IngestError(IngestErrc code, std::string message, std::size_t line = 0,
              std::string field_path = {})
      : CodedError(code, std::move(message)), line_(line), field_path_(std::move(field_path)) {}

  // 1-based source line for subtitle errors, 0 otherwise.
  std::size_t line() const { return line_; }
  // JSON pointer of the offending field for schema violations.
  const std::string& field_path() const { return field_path_; }

 private:
  std::size_t line_;
  std::string field_path_;
};

}  // namespace moocaug::ingest
