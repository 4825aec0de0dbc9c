#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guardsec/intel.hpp"
#include "guardsec/user_agent.hpp"
#include "guardsec/visitor_log.hpp"

namespace guardsec {

// The twelve connection indicators, in display order.
enum class Indicator {
  PublicIp,
  Geolocation,
  IspAsName,
  ConnectionType,
  VpnProxy,
  TorExit,
  Hosting,
  DnsLeak,
  BrowserUserAgent,
  DeviceType,
  TouchCapability,
  HardwareVendor,
};
inline constexpr std::size_t kIndicatorCount = 12;
inline constexpr Indicator kAllIndicators[kIndicatorCount] = {
    Indicator::PublicIp,    Indicator::Geolocation, Indicator::IspAsName,        Indicator::ConnectionType,
    Indicator::VpnProxy,    Indicator::TorExit,     Indicator::Hosting,          Indicator::DnsLeak,
    Indicator::BrowserUserAgent, Indicator::DeviceType, Indicator::TouchCapability, Indicator::HardwareVendor,
};

std::string_view indicator_name(Indicator i) noexcept;  // display name, e.g. "DNS leak"
std::string_view indicator_id(Indicator i) noexcept;    // slug, e.g. "dns_leak"

enum class Severity { Info, Warning, Critical };
std::string_view to_string(Severity s) noexcept;

struct NetProfile {
  std::string ip;
  int ip_version = 4;
  std::optional<std::int64_t> asn;
  std::optional<std::string> isp_name;
  std::string connection_type = "unknown";  // mobile|fibre|dsl|satellite|datacenter|unknown
};

// Every field may be absent; the city in particular is often unresolved.
struct GeoProfile {
  std::optional<std::string> country;
  std::optional<std::string> city;
  std::optional<std::string> region;
  std::optional<std::string> timezone;
  std::optional<double> lat;
  std::optional<double> lon;
};

struct ConnectionProfile {
  NetProfile net;
  GeoProfile geo;
  DeviceInfo dev;
  std::array<bool, kIndicatorCount> sec{};
  double abuse_score = 0.0;
};

struct IndicatorResult {
  Indicator indicator = Indicator::PublicIp;
  bool triggered = false;
  Severity severity = Severity::Info;
  std::string detail;
  std::string recommendation_key;  // set whenever triggered
};

struct ConnectionFlags {
  std::optional<bool> cookies;
  std::optional<bool> javascript;
  bool ipv4 = false;
  bool ipv6 = false;
};

struct ClientHints {
  std::optional<std::string> declared_timezone;
  std::optional<bool> cookies;
  std::optional<bool> javascript;
  // ASN of the resolver that answered the client's probe lookup, when known.
  std::optional<std::int64_t> resolver_asn;
};

struct AuditReport {
  ConnectionProfile profile;
  std::vector<IndicatorResult> indicators;  // always kIndicatorCount entries, display order
  std::optional<std::string> tz_declared;
  bool tz_mismatch = false;
  ConnectionFlags flags;
  double abuse_score = 0.0;
  bool abuse_warning = false;
  std::vector<std::pair<ProviderKind, CallStatus>> providers;
  std::int64_t elapsed_ms = 0;

  const IndicatorResult& indicator(Indicator i) const { return indicators[static_cast<std::size_t>(i)]; }
};

// Header names are matched case-insensitively. The pseudo-header
// "remote-addr" carries the socket peer address.
using HeaderMap = std::map<std::string, std::string>;

struct AuditOptions {
  // Forwarded hops appended by proxies we operate. 0 ignores X-Forwarded-For.
  int trusted_hops = 1;
  int deadline_ms = kDefaultCallDeadlineMs;
  double abuse_warning_threshold = 0.01;
};

// Throws Error{MissingSourceAddress}.
std::string resolve_client_ip(const HeaderMap& headers, int trusted_hops);

bool detect_dns_leak(std::optional<std::int64_t> egress_asn, std::optional<std::int64_t> resolver_asn,
                     bool anonymized);

// Canonical IANA name for common aliases ("Asia/Calcutta" -> "Asia/Kolkata").
std::string canonical_timezone(std::string_view tz);
// True iff declared is present and canonicalizes to a different zone.
bool crosscheck_timezone(std::string_view inferred, const std::optional<std::string>& declared);

// Not private, loopback, link-local or carrier-grade NAT space.
bool is_public_address(std::string_view ip);

class Auditor {
 public:
  Auditor(IntelClient intel, AuditOptions options = {});

  // Never fails on missing geo fields. Throws Error{MissingSourceAddress}.
  AuditReport audit(const HeaderMap& headers, const ClientHints& hints = {}) const;
  // Header-only profile with no provider lookups, used to log verdict requests.
  AuditReport passive(const HeaderMap& headers, const ClientHints& hints = {}) const;

  const AuditOptions& options() const { return options_; }

 private:
  IntelClient intel_;
  AuditOptions options_;
};

// Builds the persisted interaction record for an audit. Raw IP and query
// values are replaced by salted hashes.
struct QueryInfo {
  std::string kind;
  std::string canonical;
  std::optional<double> score;
};
VisitorRecord make_visitor_record(const AuditReport& report, const std::string& user_agent, std::string_view salt,
                                  std::string session_id, Timestamp at, const std::optional<QueryInfo>& query = {});

}  // namespace guardsec
