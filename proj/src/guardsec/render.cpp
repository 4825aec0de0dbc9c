#include "guardsec/render.hpp"

namespace guardsec {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json entity_to_json(const NormalizedEntity& e) {
  json j{{"kind", std::string(to_string(e.kind))}, {"canonical", e.canonical}};
  if (e.url_parts) {
    const auto& u = *e.url_parts;
    j["url_parts"] = {{"scheme", u.scheme}, {"netloc", u.netloc}, {"path", u.path},
                      {"query", opt(u.query)},  {"fragment", opt(u.fragment)}};
  }
  if (e.phone_e164) j["phone_e164"] = *e.phone_e164;
  if (e.email_parts) j["email_parts"] = {{"local", e.email_parts->local}, {"domain", e.email_parts->domain}};
  if (e.business_tokens) j["business_tokens"] = *e.business_tokens;
  return j;
}

json feature_vector_to_json(const FeatureVector& fv) {
  json j;
  if (fv.lex) {
    j["lex"] = {{"length", fv.lex->length},
                {"entropy_bits", fv.lex->entropy_bits},
                {"special_char_count", fv.lex->special_char_count},
                {"has_ip_literal", fv.lex->has_ip_literal},
                {"subdomain_count", fv.lex->subdomain_count}};
  } else {
    j["lex"] = nullptr;
  }
  j["host"] = fv.host ? json{{"asn", opt(fv.host->asn)}, {"isp_name", opt(fv.host->isp_name)},
                             {"country", opt(fv.host->country)}}
                      : json(nullptr);
  j["whois"] = fv.whois ? json{{"domain_age_days", opt(fv.whois->domain_age_days)},
                               {"registrar", opt(fv.whois->registrar)}}
                        : json(nullptr);
  j["ssl"] = fv.ssl ? json{{"cert_age_days", opt(fv.ssl->cert_age_days)}, {"trusted_ca", opt(fv.ssl->trusted_ca)}}
                    : json(nullptr);
  j["rep"] = {{"dnsbl_hits", fv.rep.dnsbl_hits},
              {"abuse_index", fv.rep.abuse_index},
              {"user_report_weight", fv.rep.user_report_weight}};
  j["business"] = fv.business ? json{{"name_similarity", fv.business->name_similarity},
                                     {"registration_signal", fv.business->registration_signal},
                                     {"web_signal", fv.business->web_signal}}
                              : json(nullptr);
  json avail = json::object();
  for (Slot s : kAllSlots) avail[std::string(to_string(s))] = std::string(to_string(fv.availability_of(s)));
  j["availability"] = avail;
  return j;
}

json verdict_to_json(const Verdict& v) {
  json dominant = json::array();
  for (const auto& d : v.dominant_features) {
    dominant.push_back({{"feature", std::string(to_string(d.feature))}, {"contribution", d.contribution}});
  }
  json contributions = json::array();
  for (const auto& c : v.contributions) {
    contributions.push_back({{"feature", std::string(to_string(c.feature))},
                             {"weight", c.weight},
                             {"transform", c.transform},
                             {"contribution", c.contribution},
                             {"fallback", c.fallback}});
  }
  json providers = json::array();
  for (const auto& p : v.providers) {
    providers.push_back({{"provider", std::string(to_string(p.provider))},
                         {"key", p.key},
                         {"status", std::string(to_string(p.status))},
                         {"elapsed_ms", p.elapsed_ms}});
  }
  return json{{"entity", entity_to_json(v.entity)},
              {"score", v.score},
              {"display_score", display_score(v.score)},
              {"threshold", v.threshold},
              {"label", std::string(to_string(v.label))},
              {"dominant_features", dominant},
              {"explanation_key", v.explanation_key},
              {"explanation", v.explanation},
              {"locale", v.locale},
              {"locale_fallback", v.locale_fallback},
              {"degraded", v.degraded},
              {"features", feature_vector_to_json(v.features)},
              {"contributions", contributions},
              {"providers", providers},
              {"evaluated_at", format_timestamp(v.evaluated_at)},
              {"elapsed_ms", v.elapsed_ms}};
}

json audit_to_json(const AuditReport& r, const Catalogs* catalogs, std::string_view locale) {
  const auto& p = r.profile;
  json sec = json::object();
  json indicators = json::array();
  for (const auto& i : r.indicators) {
    const std::string id(indicator_id(i.indicator));
    sec[id] = i.triggered;
    json row{{"id", id},
             {"name", std::string(indicator_name(i.indicator))},
             {"triggered", i.triggered},
             {"severity", std::string(to_string(i.severity))},
             {"detail", i.detail},
             {"recommendation_key", i.recommendation_key.empty() ? json(nullptr) : json(i.recommendation_key)}};
    if (catalogs) {
      row["implication"] = catalogs->text(locale, "indicator." + id + ".implication");
      row["recommendation"] =
          i.recommendation_key.empty() ? json(nullptr) : json(catalogs->text(locale, i.recommendation_key));
    }
    indicators.push_back(std::move(row));
  }
  json providers = json::array();
  for (const auto& [k, s] : r.providers) {
    providers.push_back({{"provider", std::string(to_string(k))}, {"status", std::string(to_string(s))}});
  }
  json j{{"profile",
          {{"net",
            {{"ip", p.net.ip},
             {"ip_version", p.net.ip_version},
             {"asn", opt(p.net.asn)},
             {"isp_name", opt(p.net.isp_name)},
             {"connection_type", p.net.connection_type}}},
           {"geo",
            {{"country", opt(p.geo.country)},
             {"city", opt(p.geo.city)},
             {"region", opt(p.geo.region)},
             {"timezone", opt(p.geo.timezone)},
             {"lat", opt(p.geo.lat)},
             {"lon", opt(p.geo.lon)}}},
           {"dev",
            {{"device_type", p.dev.device_type},
             {"vendor", p.dev.vendor},
             {"browser", p.dev.browser},
             {"browser_version", p.dev.browser_version},
             {"os", p.dev.os},
             {"os_version", p.dev.os_version},
             {"touch_capable", p.dev.touch_capable}}},
           {"sec", sec},
           {"abuse_score", p.abuse_score}}},
         {"indicators", indicators},
         {"tz_inferred", opt(p.geo.timezone)},
         {"tz_declared", opt(r.tz_declared)},
         {"tz_mismatch", r.tz_mismatch},
         {"flags",
          {{"cookies", opt(r.flags.cookies)},
           {"javascript", opt(r.flags.javascript)},
           {"ipv4", r.flags.ipv4},
           {"ipv6", r.flags.ipv6}}},
         {"abuse_score", r.abuse_score},
         {"abuse_warning", r.abuse_warning},
         {"providers", providers},
         {"elapsed_ms", r.elapsed_ms}};
  if (catalogs) {
    j["location_note"] = catalogs->text(locale, "audit.location_precision");
    if (r.abuse_warning) j["abuse_note"] = catalogs->text(locale, "audit.abuse_warning");
  }
  return j;
}

json chat_turn_to_json(const ChatTurn& t) {
  return json{{"user_text", t.user_text},
              {"reply_text", t.reply_text},
              {"in_scope", t.in_scope},
              {"backend", std::string(to_string(t.backend))},
              {"fallback_reason", opt(t.fallback_reason)},
              {"elapsed_ms", t.elapsed_ms}};
}

json recommendations_to_json(const std::vector<Recommendation>& recs, const Catalogs* catalogs,
                             std::string_view locale) {
  json out = json::array();
  for (const auto& r : recs) {
    json row{{"priority", r.priority}, {"text_key", r.text_key}, {"source", r.source}};
    if (catalogs) row["text"] = catalogs->text(locale, r.text_key);
    out.push_back(std::move(row));
  }
  return out;
}

json aggregate_to_json(const ReportAggregate& a) {
  return json{{"entity_canonical", a.entity_canonical},
              {"total_reports", a.total_reports},
              {"distinct_reporters", a.distinct_reporters},
              {"decayed_weight", a.decayed_weight},
              {"last_seen", a.last_seen ? json(format_timestamp(*a.last_seen)) : json(nullptr)}};
}

json submit_result_to_json(const SubmitResult& r) {
  // The reporter fingerprint stays server-side.
  return json{{"accepted", true},
              {"report",
               {{"id", r.report.id},
                {"entity_kind", std::string(to_string(r.report.entity_kind))},
                {"entity_canonical", r.report.entity_canonical},
                {"reported_at", format_timestamp(r.report.reported_at)},
                {"reporter_country", opt(r.report.reporter_country)}}},
              {"aggregate", aggregate_to_json(r.aggregate)}};
}

json stats_to_json(const AggregateStats& s) {
  return json{{"total", s.total},
              {"vpn", s.vpn},
              {"dns_leak_among_vpn", s.dns_leak_among_vpn},
              {"datacenter", s.datacenter},
              {"abuse_nonzero", s.abuse_nonzero},
              {"vpn_rate", s.vpn_rate},
              {"dns_leak_rate_among_vpn", opt(s.dns_leak_rate_among_vpn)},
              {"datacenter_rate", s.datacenter_rate},
              {"abuse_nonzero_rate", s.abuse_nonzero_rate}};
}

json strip_volatile_fields(json j) {
  if (j.is_object()) {
    j.erase("elapsed_ms");
    j.erase("uptime_s");
    for (auto& [_, v] : j.items()) v = strip_volatile_fields(std::move(v));
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_volatile_fields(std::move(v));
  }
  return j;
}

}  // namespace guardsec
