#include "doctest.h"
#include "guardsec/user_agent.hpp"

using namespace guardsec;

TEST_CASE("common user agents") {
  struct Case {
    const char* ua;
    DeviceInfo want;
  };
  const Case cases[] = {
      {"Mozilla/5.0 (iPhone; CPU iPhone OS 17_2 like Mac OS X) AppleWebKit/605.1.15 (KHTML, like Gecko) "
       "Version/17.2 Mobile/15E148 Safari/604.1",
       {"mobile", "Apple", "Safari", "17.2", "iOS", "17.2", true}},
      {"Mozilla/5.0 (Linux; Android 12; TECNO KG5) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/119.0.0.0 Mobile "
       "Safari/537.36",
       {"mobile", "Tecno", "Chrome", "119.0.0.0", "Android", "12", true}},
      {"Mozilla/5.0 (Linux; Android 13; SM-X200) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/120.0.0.0 "
       "Safari/537.36",
       {"tablet", "Samsung", "Chrome", "120.0.0.0", "Android", "13", true}},
      {"Mozilla/5.0 (Windows NT 10.0; Win64; x64; rv:121.0) Gecko/20100101 Firefox/121.0",
       {"desktop", "unknown", "Firefox", "121.0", "Windows", "10.0", false}},
      {"Mozilla/5.0 (Macintosh; Intel Mac OS X 10_15_7) AppleWebKit/605.1.15 (KHTML, like Gecko) Version/17.1 "
       "Safari/605.1.15",
       {"desktop", "Apple", "Safari", "17.1", "macOS", "10.15.7", false}},
      {"Mozilla/5.0 (Mobile; LYF/F300B/LYF-F300B-001-01-15-130718-i;Android; rv:48.0) Gecko/48.0 Firefox/48.0 "
       "KAIOS/2.5",
       {"mobile", "unknown", "Firefox", "48.0", "KaiOS", "2.5", true}},
      {"Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)",
       {"bot", "unknown", "Googlebot", "unknown", "unknown", "unknown", false}},
      {"curl/8.4.0", {"bot", "unknown", "script", "unknown", "unknown", "unknown", false}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.ua);
    const DeviceInfo got = parse_user_agent(c.ua);
    CHECK(got.device_type == c.want.device_type);
    CHECK(got.vendor == c.want.vendor);
    CHECK(got.browser == c.want.browser);
    CHECK(got.browser_version == c.want.browser_version);
    CHECK(got.os == c.want.os);
    CHECK(got.os_version == c.want.os_version);
    CHECK(got.touch_capable == c.want.touch_capable);
  }
}

TEST_CASE("empty and unknown agents stay unknown") {
  CHECK(parse_user_agent("") == DeviceInfo{});
  CHECK(parse_user_agent("SomethingElse/1.0") == DeviceInfo{});
  CHECK(user_agent_pattern_count() > 20);
}

TEST_CASE("parsing is deterministic") {
  const char* ua = "Mozilla/5.0 (Linux; Android 11; Infinix X6816) AppleWebKit/537.36 Chrome/118.0 Mobile Safari/537.36";
  CHECK(parse_user_agent(ua) == parse_user_agent(ua));
  CHECK(parse_user_agent(ua).vendor == "Infinix");
}
