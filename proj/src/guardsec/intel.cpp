#include "guardsec/intel.hpp"

#include <algorithm>
#include <cctype>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "guardsec/error.hpp"
#include "guardsec/json_util.hpp"

namespace guardsec {

using nlohmann::json;

namespace {

constexpr std::string_view kProviderNames[] = {
    "whois",       "ssl_check",  "host_info",         "reputation",        "geo_asn",          "anonymization_check",
    "abuse_score", "mx_lookup",  "disposable_domain", "phone_registry",    "business_registry",
};

constexpr std::string_view kConnectionTypes[] = {"mobile", "fibre", "dsl", "satellite", "datacenter", "unknown"};

bool is_country_code(const std::string& s) {
  return s.size() == 2 && std::isupper(static_cast<unsigned char>(s[0])) &&
         std::isupper(static_cast<unsigned char>(s[1]));
}

void check_country(ObjectReader& r, const std::optional<std::string>& c) {
  if (c && !is_country_code(*c)) r.fail("country must be an upper-case ISO-3166 alpha-2 code");
}

void check_unit(ObjectReader& r, double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) r.fail(std::string(name) + " must lie in [0,1]");
}

void check_non_negative(ObjectReader& r, long long v, const char* name) {
  if (v < 0) r.fail(std::string(name) + " must be >= 0");
}

Date read_date(ObjectReader& r, const char* name) {
  const auto text = r.required<std::string>(name);
  try {
    return parse_date(text);
  } catch (const Error& e) {
    r.fail(e.what());
  }
}

std::chrono::steady_clock::time_point now() {
  return std::chrono::steady_clock::now();
}

std::int64_t ms_between(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(b - a).count();
}

// Waits up to `delay_ms`; returns false if cancelled first.
bool cancellable_sleep(int delay_ms, std::stop_token stop) {
  if (delay_ms <= 0) return !stop.stop_requested();
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  return !cv.wait_for(lock, stop, std::chrono::milliseconds(delay_ms), [] { return false; }) &&
         !stop.stop_requested();
}

std::string domain_part_of(const NormalizedEntity& e) {
  if (e.email_parts) return e.email_parts->domain;
  const std::size_t at = e.canonical.rfind('@');
  return at == std::string::npos ? e.canonical : e.canonical.substr(at + 1);
}

}  // namespace

std::string_view to_string(ProviderKind kind) noexcept {
  return kProviderNames[static_cast<std::size_t>(kind)];
}

ProviderKind provider_from_string(std::string_view name) {
  for (ProviderKind k : kAllProviders) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::UnknownProvider, "unknown provider '" + std::string(name) + "'");
}

ProviderKind payload_provider(const Payload& p) noexcept {
  return static_cast<ProviderKind>(p.index());
}

json payload_to_json(const Payload& payload) {
  json j = json::object();
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, WhoisRecord>) {
          j["registered_on"] = format_date(r.registered_on);
          put_optional(j, "registrar", r.registrar);
        } else if constexpr (std::is_same_v<T, SslRecord>) {
          j["not_before"] = format_date(r.not_before);
          j["trusted_chain"] = r.trusted_chain;
          put_optional(j, "issuer", r.issuer);
        } else if constexpr (std::is_same_v<T, HostRecord>) {
          put_optional(j, "asn", r.asn);
          put_optional(j, "isp", r.isp);
          put_optional(j, "country", r.country);
        } else if constexpr (std::is_same_v<T, ReputationRecord>) {
          j["dnsbl_hits"] = r.dnsbl_hits;
          j["abuse_index"] = r.abuse_index;
        } else if constexpr (std::is_same_v<T, GeoRecord>) {
          put_optional(j, "asn", r.asn);
          put_optional(j, "isp", r.isp);
          put_optional(j, "country", r.country);
          put_optional(j, "city", r.city);
          put_optional(j, "region", r.region);
          put_optional(j, "timezone", r.timezone);
          put_optional(j, "lat", r.lat);
          put_optional(j, "lon", r.lon);
          put_optional(j, "connection_type", r.connection_type);
        } else if constexpr (std::is_same_v<T, AnonymizationRecord>) {
          j["vpn"] = r.vpn;
          j["proxy"] = r.proxy;
          j["tor"] = r.tor;
          j["hosting"] = r.hosting;
          put_optional(j, "resolver_asn", r.resolver_asn);
        } else if constexpr (std::is_same_v<T, AbuseRecord>) {
          j["score"] = r.score;
        } else if constexpr (std::is_same_v<T, MxRecord>) {
          j["has_mx"] = r.has_mx;
        } else if constexpr (std::is_same_v<T, DisposableRecord>) {
          j["disposable"] = r.disposable;
        } else if constexpr (std::is_same_v<T, PhoneRecord>) {
          put_optional(j, "carrier", r.carrier);
          put_optional(j, "country", r.country);
          j["fraud_reports"] = r.fraud_reports;
          j["feed_hits"] = r.feed_hits;
        } else if constexpr (std::is_same_v<T, BusinessRecord>) {
          j["registered"] = r.registered;
          put_optional(j, "jurisdiction", r.jurisdiction);
          j["known_fraud_names"] = r.known_fraud_names;
          put_optional(j, "website", r.website);
        }
      },
      payload);
  return j;
}

Payload payload_from_json(ProviderKind kind, const json& j) {
  ObjectReader r(j, std::string(to_string(kind)) + " response");
  Payload out;
  switch (kind) {
    case ProviderKind::Whois: {
      WhoisRecord rec;
      rec.registered_on = read_date(r, "registered_on");
      rec.registrar = r.optional<std::string>("registrar");
      out = rec;
      break;
    }
    case ProviderKind::SslCheck: {
      SslRecord rec;
      rec.not_before = read_date(r, "not_before");
      rec.trusted_chain = r.required<bool>("trusted_chain");
      rec.issuer = r.optional<std::string>("issuer");
      out = rec;
      break;
    }
    case ProviderKind::HostInfo: {
      HostRecord rec;
      rec.asn = r.optional<std::int64_t>("asn");
      rec.isp = r.optional<std::string>("isp");
      rec.country = r.optional<std::string>("country");
      check_country(r, rec.country);
      if (rec.asn) check_non_negative(r, *rec.asn, "asn");
      out = rec;
      break;
    }
    case ProviderKind::Reputation: {
      ReputationRecord rec;
      rec.dnsbl_hits = r.required<int>("dnsbl_hits");
      rec.abuse_index = r.required<double>("abuse_index");
      check_non_negative(r, rec.dnsbl_hits, "dnsbl_hits");
      check_unit(r, rec.abuse_index, "abuse_index");
      out = rec;
      break;
    }
    case ProviderKind::GeoAsn: {
      GeoRecord rec;
      rec.asn = r.optional<std::int64_t>("asn");
      rec.isp = r.optional<std::string>("isp");
      rec.country = r.optional<std::string>("country");
      rec.city = r.optional<std::string>("city");
      rec.region = r.optional<std::string>("region");
      rec.timezone = r.optional<std::string>("timezone");
      rec.lat = r.optional<double>("lat");
      rec.lon = r.optional<double>("lon");
      rec.connection_type = r.optional<std::string>("connection_type");
      check_country(r, rec.country);
      if (rec.lat && !(*rec.lat >= -90.0 && *rec.lat <= 90.0)) r.fail("lat out of range");
      if (rec.lon && !(*rec.lon >= -180.0 && *rec.lon <= 180.0)) r.fail("lon out of range");
      if (rec.connection_type &&
          std::find(std::begin(kConnectionTypes), std::end(kConnectionTypes), *rec.connection_type) ==
              std::end(kConnectionTypes)) {
        r.fail("unknown connection_type '" + *rec.connection_type + "'");
      }
      out = rec;
      break;
    }
    case ProviderKind::AnonymizationCheck: {
      AnonymizationRecord rec;
      rec.vpn = r.required<bool>("vpn");
      rec.proxy = r.required<bool>("proxy");
      rec.tor = r.required<bool>("tor");
      rec.hosting = r.required<bool>("hosting");
      rec.resolver_asn = r.optional<std::int64_t>("resolver_asn");
      out = rec;
      break;
    }
    case ProviderKind::AbuseScore: {
      // Accepts the normalized score or the 0-100 confidence score reported by
      // AbuseIPDB-style feeds; always stored normalized.
      AbuseRecord rec;
      const auto score = r.optional<double>("score");
      const auto confidence = r.optional<double>("abuse_confidence_score");
      if (score.has_value() == confidence.has_value()) {
        r.fail("exactly one of 'score' and 'abuse_confidence_score' is required");
      }
      if (confidence) {
        if (!(*confidence >= 0.0 && *confidence <= 100.0)) r.fail("abuse_confidence_score must lie in [0,100]");
        rec.score = *confidence / 100.0;
      } else {
        rec.score = *score;
      }
      check_unit(r, rec.score, "score");
      out = rec;
      break;
    }
    case ProviderKind::MxLookup: out = MxRecord{r.required<bool>("has_mx")}; break;
    case ProviderKind::DisposableDomain: out = DisposableRecord{r.required<bool>("disposable")}; break;
    case ProviderKind::PhoneRegistry: {
      PhoneRecord rec;
      rec.carrier = r.optional<std::string>("carrier");
      rec.country = r.optional<std::string>("country");
      rec.fraud_reports = r.value_or<int>("fraud_reports", 0);
      rec.feed_hits = r.value_or<int>("feed_hits", 0);
      check_country(r, rec.country);
      check_non_negative(r, rec.fraud_reports, "fraud_reports");
      check_non_negative(r, rec.feed_hits, "feed_hits");
      out = rec;
      break;
    }
    case ProviderKind::BusinessRegistry: {
      BusinessRecord rec;
      rec.registered = r.required<bool>("registered");
      rec.jurisdiction = r.optional<std::string>("jurisdiction");
      rec.known_fraud_names = r.value_or<std::vector<std::string>>("known_fraud_names", {});
      rec.website = r.optional<std::string>("website");
      out = rec;
      break;
    }
  }
  r.finish();
  return out;
}

// --- Backends ---------------------------------------------------------------

FixtureBackend::FixtureBackend(FixtureSet fixtures, std::unordered_set<std::string> disposable_domains)
    : fixtures_(std::move(fixtures)), disposable_(std::move(disposable_domains)) {}

ProviderOutcome FixtureBackend::fetch(ProviderKind provider, const std::string& key, std::stop_token stop) const {
  ProviderOutcome out;
  const FixtureEntry* entry = fixtures_.find(provider, key);
  if (entry == nullptr) {
    if (provider == ProviderKind::DisposableDomain) {
      out.status = CallStatus::Ok;
      out.payload = DisposableRecord{disposable_.count(key) > 0};
      return out;
    }
    out.status = CallStatus::Failed;
    out.detail = "no fixture for " + std::string(to_string(provider)) + " '" + key + "'";
    return out;
  }
  if (entry->fail) {
    out.status = CallStatus::Failed;
    out.detail = "fixture marked as failing";
    return out;
  }
  if (!cancellable_sleep(entry->delay_ms, stop)) {
    out.status = CallStatus::TimedOut;
    out.detail = "cancelled";
    return out;
  }
  out.status = CallStatus::Ok;
  out.payload = entry->response;
  return out;
}

LiveBackend::LiveBackend(std::unordered_set<std::string> disposable_domains)
    : disposable_(std::move(disposable_domains)) {}

ProviderOutcome LiveBackend::fetch(ProviderKind provider, const std::string& key, std::stop_token) const {
  ProviderOutcome out;
  if (provider == ProviderKind::DisposableDomain) {
    out.status = CallStatus::Ok;
    out.payload = DisposableRecord{disposable_.count(key) > 0};
    return out;
  }
  out.status = CallStatus::Failed;
  out.detail = "live " + std::string(to_string(provider)) + " backend is not configured";
  return out;
}

// --- Deadline-bounded calls -------------------------------------------------

struct CallState {
  std::mutex m;
  std::condition_variable cv;
  bool done = false;
  ProviderOutcome result;
  std::chrono::steady_clock::time_point finished_at{};
  std::stop_source stop;
};

PendingCall::PendingCall(std::shared_ptr<CallState> state, TimePoint start, int deadline_ms)
    : state_(std::move(state)), start_(start), deadline_ms_(deadline_ms) {}

PendingCall::~PendingCall() {
  if (state_) state_->stop.request_stop();
}

ProviderOutcome PendingCall::wait() {
  return wait_until(start_ + std::chrono::milliseconds(deadline_ms_));
}

ProviderOutcome PendingCall::wait_until(TimePoint join) {
  const TimePoint deadline = start_ + std::chrono::milliseconds(deadline_ms_);
  const TimePoint limit = std::min(join, deadline);
  std::unique_lock lock(state_->m);
  if (state_->cv.wait_until(lock, limit, [&] { return state_->done; })) {
    ProviderOutcome out = state_->result;
    out.elapsed_ms = ms_between(start_, state_->finished_at);
    if (out.status != CallStatus::Ok) out.payload.reset();
    if (out.status == CallStatus::Ok && !out.payload) {
      out.status = CallStatus::Failed;
      out.detail = "backend returned no payload";
    }
    // A result that lands after the deadline is late even if it won the lock.
    if (out.elapsed_ms > deadline_ms_) {
      out.status = CallStatus::TimedOut;
      out.payload.reset();
    }
    return out;
  }
  lock.unlock();
  state_->stop.request_stop();
  ProviderOutcome out;
  out.status = CallStatus::TimedOut;
  out.elapsed_ms = ms_between(start_, now());
  out.detail = "deadline of " + std::to_string(deadline_ms_) + " ms exceeded";
  return out;
}

IntelClient::IntelClient(std::shared_ptr<const IntelBackend> backend) : backend_(std::move(backend)) {
  if (!backend_) throw Error(ErrorCode::InvalidArgument, "intel backend is null");
}

PendingCall IntelClient::start(ProviderKind provider, std::string key, int deadline_ms) const {
  if (deadline_ms <= 0) {
    throw Error(ErrorCode::InvalidArgument, "deadline_ms must be positive");
  }
  auto state = std::make_shared<CallState>();
  const auto started = now();
  std::thread([state, backend = backend_, provider, key = std::move(key)] {
    ProviderOutcome result;
    try {
      result = backend->fetch(provider, key, state->stop.get_token());
    } catch (const std::exception& e) {
      result.status = CallStatus::Failed;
      result.detail = e.what();
    }
    {
      std::lock_guard lock(state->m);
      state->result = std::move(result);
      state->finished_at = now();
      state->done = true;
    }
    state->cv.notify_all();
  }).detach();
  return PendingCall(std::move(state), started, deadline_ms);
}

ProviderOutcome IntelClient::call_with_deadline(ProviderKind provider, const std::string& key,
                                                int deadline_ms) const {
  return start(provider, key, deadline_ms).wait();
}

ProviderOutcome IntelClient::call_with_deadline(std::string_view provider, const std::string& key,
                                                int deadline_ms) const {
  return call_with_deadline(provider_from_string(provider), key, deadline_ms);
}

ProviderOutcome IntelClient::lookup(ProviderKind provider, const NormalizedEntity& entity, int deadline_ms) const {
  return call_with_deadline(provider, lookup_key(provider, entity), deadline_ms);
}

bool provider_applies(ProviderKind provider, EntityKind kind) noexcept {
  switch (provider) {
    case ProviderKind::Whois:
    case ProviderKind::HostInfo:
    case ProviderKind::Reputation:
      return kind == EntityKind::Url || kind == EntityKind::Domain || kind == EntityKind::Email ||
             kind == EntityKind::Business;
    case ProviderKind::SslCheck:
      return kind == EntityKind::Url || kind == EntityKind::Domain || kind == EntityKind::Business;
    case ProviderKind::MxLookup:
    case ProviderKind::DisposableDomain: return kind == EntityKind::Email;
    case ProviderKind::PhoneRegistry: return kind == EntityKind::Phone;
    case ProviderKind::BusinessRegistry: return kind == EntityKind::Business;
    case ProviderKind::GeoAsn:
    case ProviderKind::AnonymizationCheck:
    case ProviderKind::AbuseScore: return false;
  }
  return false;
}

std::string lookup_key(ProviderKind provider, const NormalizedEntity& entity) {
  if (!provider_applies(provider, entity.kind)) {
    throw Error(ErrorCode::InapplicableKind, std::string(to_string(provider)) + " does not serve " +
                                                 std::string(to_string(entity.kind)) + " entities");
  }
  switch (entity.kind) {
    case EntityKind::Url:
      return entity.url_parts ? entity.url_parts->host() : entity.canonical;
    case EntityKind::Email: return domain_part_of(entity);
    case EntityKind::Phone: return entity.phone_e164.value_or(entity.canonical);
    case EntityKind::Domain:
    case EntityKind::Business: return entity.canonical;
  }
  return entity.canonical;
}

long domain_age_days(const WhoisRecord& record, Date as_of) {
  return std::max(0L, days_between(record.registered_on, as_of));
}

}  // namespace guardsec
