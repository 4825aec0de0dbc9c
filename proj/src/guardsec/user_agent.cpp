#include "guardsec/user_agent.hpp"

#include <algorithm>
#include <regex>
#include <vector>

namespace guardsec {

namespace {

enum class Field { Bot, Os, Device, Vendor, Browser };

struct Pattern {
  Field field;
  std::regex re;
  std::string value;
  // Index of the capture group holding a version, 0 for none.
  int version_group = 0;
};

Pattern make(Field f, const char* re, const char* value, int group = 0) {
  return Pattern{f, std::regex(re, std::regex::ECMAScript | std::regex::optimize), value, group};
}

// First match wins within each field.
const std::vector<Pattern>& table() {
  static const std::vector<Pattern> patterns = [] {
    std::vector<Pattern> p;
    p.push_back(make(Field::Bot, R"(Googlebot)", "Googlebot"));
    p.push_back(make(Field::Bot, R"(bingbot)", "Bingbot"));
    p.push_back(make(Field::Bot, R"(YandexBot)", "YandexBot"));
    p.push_back(make(Field::Bot, R"(DuckDuckBot)", "DuckDuckBot"));
    p.push_back(make(Field::Bot, R"(Baiduspider)", "Baiduspider"));
    p.push_back(make(Field::Bot, R"(facebookexternalhit)", "Facebook"));
    p.push_back(make(Field::Bot, R"(^(curl|Wget|python-requests)/)", "script"));
    p.push_back(make(Field::Bot, R"((bot|crawler|spider)\b)", "bot"));

    p.push_back(make(Field::Os, R"(Android (\d+(\.\d+)*))", "Android", 1));
    p.push_back(make(Field::Os, R"(KAIOS/(\d+(\.\d+)*))", "KaiOS", 1));
    p.push_back(make(Field::Os, R"((?:iPhone|CPU) OS (\d+(_\d+)*))", "iOS", 1));
    p.push_back(make(Field::Os, R"(Windows NT (\d+\.\d+))", "Windows", 1));
    p.push_back(make(Field::Os, R"(Mac OS X (\d+([_.]\d+)*))", "macOS", 1));
    p.push_back(make(Field::Os, R"(CrOS)", "ChromeOS"));
    p.push_back(make(Field::Os, R"(Linux)", "Linux"));

    p.push_back(make(Field::Device, R"(iPad|Tablet)", "tablet"));
    p.push_back(make(Field::Device, R"(^(?!.*Mobile).*Android)", "tablet"));
    p.push_back(make(Field::Device, R"(Mobile|iPhone|KAIOS)", "mobile"));
    p.push_back(make(Field::Device, R"(Windows NT|Macintosh|CrOS|X11)", "desktop"));

    p.push_back(make(Field::Vendor, R"(iPhone|iPad|Macintosh)", "Apple"));
    p.push_back(make(Field::Vendor, R"(SM-[A-Z0-9]+|Samsung)", "Samsung"));
    p.push_back(make(Field::Vendor, R"(TECNO)", "Tecno"));
    p.push_back(make(Field::Vendor, R"(Infinix)", "Infinix"));
    p.push_back(make(Field::Vendor, R"(\bitel\b)", "itel"));
    p.push_back(make(Field::Vendor, R"(HUAWEI|Huawei)", "Huawei"));
    p.push_back(make(Field::Vendor, R"(Redmi|Xiaomi|\bMI \d)", "Xiaomi"));
    p.push_back(make(Field::Vendor, R"(Pixel)", "Google"));

    p.push_back(make(Field::Browser, R"(Edg/(\d+(\.\d+)*))", "Edge", 1));
    p.push_back(make(Field::Browser, R"(OPR/(\d+(\.\d+)*))", "Opera", 1));
    p.push_back(make(Field::Browser, R"(Opera Mini/(\d+(\.\d+)*))", "Opera Mini", 1));
    p.push_back(make(Field::Browser, R"(SamsungBrowser/(\d+(\.\d+)*))", "Samsung Internet", 1));
    p.push_back(make(Field::Browser, R"(UCBrowser/(\d+(\.\d+)*))", "UC Browser", 1));
    p.push_back(make(Field::Browser, R"(Firefox/(\d+(\.\d+)*))", "Firefox", 1));
    p.push_back(make(Field::Browser, R"((?:CriOS|Chrome)/(\d+(\.\d+)*))", "Chrome", 1));
    p.push_back(make(Field::Browser, R"(Version/(\d+(\.\d+)*).*Safari/)", "Safari", 1));
    return p;
  }();
  return patterns;
}

}  // namespace

std::size_t user_agent_pattern_count() {
  return table().size();
}

DeviceInfo parse_user_agent(std::string_view ua) {
  DeviceInfo info;
  if (ua.empty()) return info;
  const std::string s(ua);
  bool bot = false, os = false, device = false, vendor = false, browser = false;
  for (const auto& p : table()) {
    bool* done = nullptr;
    switch (p.field) {
      case Field::Bot: done = &bot; break;
      case Field::Os: done = &os; break;
      case Field::Device: done = &device; break;
      case Field::Vendor: done = &vendor; break;
      case Field::Browser: done = &browser; break;
    }
    if (*done) continue;
    std::smatch m;
    if (!std::regex_search(s, m, p.re)) continue;
    *done = true;
    const std::string version = p.version_group > 0 ? m[p.version_group].str() : std::string();
    switch (p.field) {
      case Field::Bot:
        info.device_type = "bot";
        info.browser = p.value;
        break;
      case Field::Os:
        info.os = p.value;
        if (!version.empty()) {
          info.os_version = version;
          std::replace(info.os_version.begin(), info.os_version.end(), '_', '.');
        }
        break;
      case Field::Device: info.device_type = p.value; break;
      case Field::Vendor: info.vendor = p.value; break;
      case Field::Browser:
        info.browser = p.value;
        if (!version.empty()) info.browser_version = version;
        break;
    }
    // A bot identity overrides device and browser patterns.
    if (p.field == Field::Bot) device = browser = true;
  }
  info.touch_capable = info.device_type == "mobile" || info.device_type == "tablet";
  return info;
}

}  // namespace guardsec
