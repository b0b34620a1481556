#pragma once

#include <string>
#include <string_view>

namespace moocaug {

// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::string_view bytes);

}  // namespace moocaug
