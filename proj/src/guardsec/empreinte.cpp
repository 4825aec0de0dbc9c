#include "guardsec/empreinte.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <cctype>
#include <chrono>

#include "guardsec/error.hpp"
#include "guardsec/privacy.hpp"

namespace guardsec {

namespace {

struct IndicatorInfo {
  std::string_view name;
  std::string_view id;
  Severity severity;
};

constexpr IndicatorInfo kIndicatorInfo[kIndicatorCount] = {
    {"Public IP address", "public_ip", Severity::Info},
    {"Geolocation", "geolocation", Severity::Info},
    {"ISP / AS name", "isp", Severity::Info},
    {"Connection type", "connection_type", Severity::Info},
    {"VPN / proxy detected", "vpn_proxy", Severity::Warning},
    {"Tor exit node", "tor", Severity::Warning},
    {"Hosting / datacenter", "hosting", Severity::Warning},
    {"DNS leak", "dns_leak", Severity::Critical},
    {"Browser user-agent", "browser", Severity::Info},
    {"Device type", "device_type", Severity::Info},
    {"Touch capability", "touch", Severity::Info},
    {"Hardware vendor", "vendor", Severity::Info},
};

constexpr std::pair<std::string_view, std::string_view> kTimezoneAliases[] = {
    {"Africa/Asmera", "Africa/Asmara"},
    {"Africa/Timbuktu", "Africa/Bamako"},
    {"America/Buenos_Aires", "America/Argentina/Buenos_Aires"},
    {"Asia/Calcutta", "Asia/Kolkata"},
    {"Asia/Katmandu", "Asia/Kathmandu"},
    {"Asia/Saigon", "Asia/Ho_Chi_Minh"},
    {"Europe/Belfast", "Europe/London"},
    {"Europe/Kiev", "Europe/Kyiv"},
    {"GB", "Europe/London"},
    {"GMT", "Etc/UTC"},
    {"Etc/GMT", "Etc/UTC"},
    {"Etc/Universal", "Etc/UTC"},
    {"Etc/Zulu", "Etc/UTC"},
    {"UTC", "Etc/UTC"},
    {"Universal", "Etc/UTC"},
    {"US/Central", "America/Chicago"},
    {"US/Eastern", "America/New_York"},
    {"US/Mountain", "America/Denver"},
    {"US/Pacific", "America/Los_Angeles"},
    {"Zulu", "Etc/UTC"},
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<std::string> header(const HeaderMap& headers, std::string_view name) {
  for (const auto& [k, v] : headers) {
    if (lower(k) == name) return v;
  }
  return std::nullopt;
}

std::string strip_brackets(std::string s) {
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') return s.substr(1, s.size() - 2);
  return s;
}

bool is_ip(const std::string& s) {
  return is_ipv4_literal(s) || is_ipv6_literal(s);
}

std::string describe(const std::optional<std::string>& v) {
  return v.value_or("unknown");
}

void fill_indicators(AuditReport& r, const DeviceInfo& dev, bool anonymized, bool tor, bool hosting, bool leak) {
  const auto& net = r.profile.net;
  const auto& geo = r.profile.geo;
  std::array<std::pair<bool, std::string>, kIndicatorCount> eval;
  eval[0] = {is_public_address(net.ip), net.ip};
  {
    std::string where = geo.city ? *geo.city + ", " + describe(geo.country) : describe(geo.country);
    eval[1] = {geo.country.has_value() || geo.city.has_value(), where};
  }
  {
    std::string isp = describe(net.isp_name);
    if (net.asn) isp += " (AS" + std::to_string(*net.asn) + ")";
    eval[2] = {net.isp_name.has_value() || net.asn.has_value(), isp};
  }
  eval[3] = {net.connection_type != "unknown", net.connection_type};
  eval[4] = {anonymized, anonymized ? "anonymization detected" : "none detected"};
  eval[5] = {tor, tor ? "Tor exit node" : "not a Tor exit"};
  eval[6] = {hosting, hosting ? "datacenter or hosting network" : "residential or mobile network"};
  eval[7] = {leak, leak ? "resolver network differs from the anonymized egress" : "no leak observed"};
  {
    std::string ua = dev.browser;
    if (dev.browser_version != "unknown") ua += " " + dev.browser_version;
    ua += " on " + dev.os;
    if (dev.os_version != "unknown") ua += " " + dev.os_version;
    eval[8] = {dev.browser != "unknown", ua};
  }
  eval[9] = {dev.device_type != "unknown", dev.device_type};
  eval[10] = {dev.touch_capable, dev.touch_capable ? "touch input" : "no touch input"};
  eval[11] = {dev.vendor != "unknown", dev.vendor};

  r.indicators.clear();
  for (std::size_t i = 0; i < kIndicatorCount; ++i) {
    IndicatorResult ir;
    ir.indicator = kAllIndicators[i];
    ir.triggered = eval[i].first;
    ir.severity = kIndicatorInfo[i].severity;
    ir.detail = eval[i].second;
    if (ir.triggered) ir.recommendation_key = "rec." + std::string(kIndicatorInfo[i].id);
    r.profile.sec[i] = ir.triggered;
    r.indicators.push_back(std::move(ir));
  }
}

}  // namespace

std::string_view indicator_name(Indicator i) noexcept {
  return kIndicatorInfo[static_cast<std::size_t>(i)].name;
}

std::string_view indicator_id(Indicator i) noexcept {
  return kIndicatorInfo[static_cast<std::size_t>(i)].id;
}

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Critical: return "critical";
  }
  return "info";
}

std::string resolve_client_ip(const HeaderMap& headers, int trusted_hops) {
  if (trusted_hops > 0) {
    if (const auto xff = header(headers, "x-forwarded-for")) {
      std::vector<std::string> hops;
      std::size_t start = 0;
      while (start <= xff->size()) {
        const std::size_t comma = xff->find(',', start);
        const std::size_t end = comma == std::string::npos ? xff->size() : comma;
        hops.push_back(strip_brackets(trim(std::string_view(*xff).substr(start, end - start))));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (hops.size() >= static_cast<std::size_t>(trusted_hops)) {
        const std::string& candidate = hops[hops.size() - static_cast<std::size_t>(trusted_hops)];
        if (is_ip(candidate)) return candidate;
      }
    }
  }
  if (const auto remote = header(headers, "remote-addr")) {
    const std::string ip = strip_brackets(trim(*remote));
    if (is_ip(ip)) return ip;
  }
  throw Error(ErrorCode::MissingSourceAddress, "request carries no usable source address");
}

bool detect_dns_leak(std::optional<std::int64_t> egress_asn, std::optional<std::int64_t> resolver_asn,
                     bool anonymized) {
  return anonymized && resolver_asn.has_value() && egress_asn.has_value() && *resolver_asn != *egress_asn;
}

std::string canonical_timezone(std::string_view tz) {
  for (const auto& [alias, canonical] : kTimezoneAliases) {
    if (alias == tz) return std::string(canonical);
  }
  return std::string(tz);
}

bool crosscheck_timezone(std::string_view inferred, const std::optional<std::string>& declared) {
  if (!declared) return false;
  return canonical_timezone(*declared) != canonical_timezone(inferred);
}

bool is_public_address(std::string_view ip_text) {
  const std::string ip = strip_brackets(std::string(ip_text));
  in_addr v4{};
  if (inet_pton(AF_INET, ip.c_str(), &v4) == 1) {
    const std::uint32_t a = ntohl(v4.s_addr);
    auto in = [a](std::uint32_t net, int bits) { return (a >> (32 - bits)) == (net >> (32 - bits)); };
    return !(in(0x0A000000, 8) || in(0xAC100000, 12) || in(0xC0A80000, 16) || in(0x7F000000, 8) ||
             in(0xA9FE0000, 16) || in(0x64400000, 10) || in(0x00000000, 8));
  }
  in6_addr v6{};
  if (inet_pton(AF_INET6, ip.c_str(), &v6) == 1) {
    const auto* b = v6.s6_addr;
    const bool loopback = std::all_of(b, b + 15, [](unsigned char c) { return c == 0; }) && b[15] == 1;
    const bool unique_local = (b[0] & 0xFE) == 0xFC;
    const bool link_local = b[0] == 0xFE && (b[1] & 0xC0) == 0x80;
    return !(loopback || unique_local || link_local);
  }
  return false;
}

Auditor::Auditor(IntelClient intel, AuditOptions options) : intel_(std::move(intel)), options_(options) {}

AuditReport Auditor::passive(const HeaderMap& headers, const ClientHints& hints) const {
  AuditReport r;
  r.profile.net.ip = resolve_client_ip(headers, options_.trusted_hops);
  r.profile.net.ip_version = is_ipv4_literal(r.profile.net.ip) ? 4 : 6;
  r.profile.dev = parse_user_agent(header(headers, "user-agent").value_or(""));
  r.flags.ipv4 = r.profile.net.ip_version == 4;
  r.flags.ipv6 = r.profile.net.ip_version == 6;
  r.flags.cookies = hints.cookies;
  r.flags.javascript = hints.javascript;
  r.tz_declared = hints.declared_timezone;
  fill_indicators(r, r.profile.dev, false, false, false, false);
  return r;
}

AuditReport Auditor::audit(const HeaderMap& headers, const ClientHints& hints) const {
  const auto t0 = std::chrono::steady_clock::now();
  AuditReport r = passive(headers, hints);
  const std::string& ip = r.profile.net.ip;

  PendingCall geo_call = intel_.start(ProviderKind::GeoAsn, ip, options_.deadline_ms);
  PendingCall anon_call = intel_.start(ProviderKind::AnonymizationCheck, ip, options_.deadline_ms);
  PendingCall abuse_call = intel_.start(ProviderKind::AbuseScore, ip, options_.deadline_ms);
  const ProviderOutcome geo = geo_call.wait();
  const ProviderOutcome anon = anon_call.wait();
  const ProviderOutcome abuse = abuse_call.wait();
  r.providers = {{ProviderKind::GeoAsn, geo.status},
                 {ProviderKind::AnonymizationCheck, anon.status},
                 {ProviderKind::AbuseScore, abuse.status}};

  if (geo.status == CallStatus::Ok) {
    const auto& g = std::get<GeoRecord>(*geo.payload);
    r.profile.net.asn = g.asn;
    r.profile.net.isp_name = g.isp;
    r.profile.net.connection_type = g.connection_type.value_or("unknown");
    r.profile.geo = GeoProfile{g.country, g.city, g.region, g.timezone, g.lat, g.lon};
  }
  bool vpn = false, tor = false, hosting = r.profile.net.connection_type == "datacenter";
  std::optional<std::int64_t> resolver_asn = hints.resolver_asn;
  if (anon.status == CallStatus::Ok) {
    const auto& a = std::get<AnonymizationRecord>(*anon.payload);
    tor = a.tor;
    vpn = a.vpn || a.proxy || a.tor;
    hosting = hosting || a.hosting;
    if (a.resolver_asn) resolver_asn = a.resolver_asn;
  }
  if (abuse.status == CallStatus::Ok) {
    r.abuse_score = std::get<AbuseRecord>(*abuse.payload).score;
  }
  r.profile.abuse_score = r.abuse_score;
  r.abuse_warning = r.abuse_score >= options_.abuse_warning_threshold;
  const bool leak = detect_dns_leak(r.profile.net.asn, resolver_asn, vpn);
  fill_indicators(r, r.profile.dev, vpn, tor, hosting, leak);

  if (r.profile.geo.timezone) r.tz_mismatch = crosscheck_timezone(*r.profile.geo.timezone, hints.declared_timezone);
  r.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

VisitorRecord make_visitor_record(const AuditReport& report, const std::string& user_agent, std::string_view salt,
                                  std::string session_id, Timestamp at, const std::optional<QueryInfo>& query) {
  VisitorRecord v;
  const auto& p = report.profile;
  v.ip_hash = salted_hash(salt, p.net.ip);
  v.country = p.geo.country;
  v.city = p.geo.city;
  v.region = p.geo.region;
  v.timezone = p.geo.timezone;
  v.lat = p.geo.lat;
  v.lon = p.geo.lon;
  v.isp = p.net.isp_name;
  v.asn = p.net.asn;
  v.connection_type = p.net.connection_type;
  v.device_type = p.dev.device_type;
  v.device_vendor = p.dev.vendor;
  v.browser = p.dev.browser;
  v.browser_version = p.dev.browser_version;
  v.os = p.dev.os;
  v.os_version = p.dev.os_version;
  v.user_agent = user_agent;
  v.cookies_enabled = report.flags.cookies;
  v.javascript_enabled = report.flags.javascript;
  v.touch_capable = p.dev.touch_capable;
  v.ipv4_present = report.flags.ipv4;
  v.ipv6_present = report.flags.ipv6;
  v.vpn_flag = report.indicator(Indicator::VpnProxy).triggered;
  v.tor_flag = report.indicator(Indicator::TorExit).triggered;
  v.hosting_flag = report.indicator(Indicator::Hosting).triggered;
  v.dns_leak_flag = report.indicator(Indicator::DnsLeak).triggered;
  v.abuse_score = report.abuse_score;
  if (query) {
    v.query_kind = query->kind;
    v.query_canonical_hash = salted_hash(salt, query->canonical);
    v.verdict_score = query->score;
  }
  v.session_id = std::move(session_id);
  v.recorded_at = at;
  return v;
}

}  // namespace guardsec
