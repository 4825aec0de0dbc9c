#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "guardsec/record_store.hpp"
#include "guardsec/time.hpp"
#include "json.hpp"

namespace guardsec {

// One interaction. Field order and names are frozen in docs/visitor-record.md.
struct VisitorRecord {
  std::string ip_hash;
  std::optional<std::string> country;
  std::optional<std::string> city;
  std::optional<std::string> region;
  std::optional<std::string> timezone;
  std::optional<double> lat;
  std::optional<double> lon;
  std::optional<std::string> isp;
  std::optional<std::int64_t> asn;
  std::string connection_type = "unknown";
  std::string device_type = "unknown";
  std::string device_vendor = "unknown";
  std::string browser = "unknown";
  std::string browser_version = "unknown";
  std::string os = "unknown";
  std::string os_version = "unknown";
  std::string user_agent;
  std::optional<bool> cookies_enabled;
  std::optional<bool> javascript_enabled;
  bool touch_capable = false;
  bool ipv4_present = false;
  bool ipv6_present = false;
  bool vpn_flag = false;
  bool tor_flag = false;
  bool hosting_flag = false;
  bool dns_leak_flag = false;
  double abuse_score = 0.0;
  std::optional<std::string> query_kind;
  std::optional<std::string> query_canonical_hash;
  std::optional<double> verdict_score;
  std::string session_id;
  Timestamp recorded_at{};

  friend bool operator==(const VisitorRecord&, const VisitorRecord&) = default;
};

inline constexpr std::array<std::string_view, 32> kVisitorFields = {
    "ip_hash",         "country",       "city",           "region",
    "timezone",        "lat",           "lon",            "isp",
    "asn",             "connection_type", "device_type",  "device_vendor",
    "browser",         "browser_version", "os",           "os_version",
    "user_agent",      "cookies_enabled", "javascript_enabled", "touch_capable",
    "ipv4_present",    "ipv6_present",  "vpn_flag",       "tor_flag",
    "hosting_flag",    "dns_leak_flag", "abuse_score",    "query_kind",
    "query_canonical_hash", "verdict_score", "session_id", "recorded_at",
};

template <class R>
constexpr auto visitor_fields(R& r) {
  return std::tie(r.ip_hash, r.country, r.city, r.region, r.timezone, r.lat, r.lon, r.isp, r.asn, r.connection_type,
                  r.device_type, r.device_vendor, r.browser, r.browser_version, r.os, r.os_version, r.user_agent,
                  r.cookies_enabled, r.javascript_enabled, r.touch_capable, r.ipv4_present, r.ipv6_present,
                  r.vpn_flag, r.tor_flag, r.hosting_flag, r.dns_leak_flag, r.abuse_score, r.query_kind,
                  r.query_canonical_hash, r.verdict_score, r.session_id, r.recorded_at);
}

static_assert(std::tuple_size_v<decltype(visitor_fields(std::declval<VisitorRecord&>()))> == 32);
static_assert(kVisitorFields.size() == 32);

nlohmann::json visitor_record_to_json(const VisitorRecord& r);
// Throws Error{SchemaViolation}. All 32 fields must be present (nullable ones may be null).
VisitorRecord visitor_record_from_json(const nlohmann::json& j);

struct AggregateStats {
  std::int64_t total = 0;
  std::int64_t vpn = 0;
  std::int64_t dns_leak_among_vpn = 0;
  std::int64_t datacenter = 0;
  std::int64_t abuse_nonzero = 0;
  double vpn_rate = 0.0;
  std::optional<double> dns_leak_rate_among_vpn;  // null when vpn == 0
  double datacenter_rate = 0.0;
  double abuse_nonzero_rate = 0.0;
};

// Counts records with from <= recorded_at <= to. Throws Error{InvalidArgument} if from > to.
AggregateStats aggregate_stats(const std::vector<VisitorRecord>& records, Timestamp from, Timestamp to);

class VisitorLog {
 public:
  explicit VisitorLog(RecordStore& store) : store_(store) {}

  // Returns the store id. Throws Error{StoreUnavailable}.
  std::int64_t log_interaction(const VisitorRecord& record);

  std::vector<VisitorRecord> records() const;
  AggregateStats aggregate_stats(Timestamp from, Timestamp to) const;

 private:
  RecordStore& store_;
};

inline constexpr std::string_view kVisitRecordType = "visit";

}  // namespace guardsec
