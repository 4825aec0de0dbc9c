#pragma once

#include <string>
#include <string_view>

namespace guardsec {

// device_type is one of mobile, desktop, tablet, bot, unknown. Every other
// string field is "unknown" when no pattern matched.
struct DeviceInfo {
  std::string device_type = "unknown";
  std::string vendor = "unknown";
  std::string browser = "unknown";
  std::string browser_version = "unknown";
  std::string os = "unknown";
  std::string os_version = "unknown";
  bool touch_capable = false;

  friend bool operator==(const DeviceInfo&, const DeviceInfo&) = default;
};

// Deterministic lookup against the compiled-in pattern table.
DeviceInfo parse_user_agent(std::string_view ua);

// Number of entries in the pattern table.
std::size_t user_agent_pattern_count();

}  // namespace guardsec
