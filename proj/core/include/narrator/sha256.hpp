#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace narrator {

// FIPS 180-4 SHA-256, lowercase hex digest.
std::string sha256_hex(std::string_view data);

}  // namespace narrator
