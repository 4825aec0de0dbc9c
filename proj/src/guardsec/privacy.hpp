#pragma once

#include <string>
#include <string_view>

namespace guardsec {

// Lower-case hex SHA-256 of salt || 0x00 || value. Used wherever an IP address
// or query value would otherwise be persisted.
std::string salted_hash(std::string_view salt, std::string_view value);

}  // namespace guardsec
