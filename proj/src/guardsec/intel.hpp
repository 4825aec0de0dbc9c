#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "guardsec/entity.hpp"
#include "guardsec/features.hpp"
#include "guardsec/time.hpp"
#include "json.hpp"

namespace guardsec {

enum class ProviderKind {
  Whois,
  SslCheck,
  HostInfo,
  Reputation,
  GeoAsn,
  AnonymizationCheck,
  AbuseScore,
  MxLookup,
  DisposableDomain,
  PhoneRegistry,
  BusinessRegistry,
};
inline constexpr ProviderKind kAllProviders[] = {
    ProviderKind::Whois,        ProviderKind::SslCheck,         ProviderKind::HostInfo,
    ProviderKind::Reputation,   ProviderKind::GeoAsn,           ProviderKind::AnonymizationCheck,
    ProviderKind::AbuseScore,   ProviderKind::MxLookup,         ProviderKind::DisposableDomain,
    ProviderKind::PhoneRegistry, ProviderKind::BusinessRegistry,
};

std::string_view to_string(ProviderKind kind) noexcept;
// Throws Error{UnknownProvider}.
ProviderKind provider_from_string(std::string_view name);

inline constexpr int kDefaultCallDeadlineMs = 1500;
inline constexpr int kDeadlineSlackMs = 50;

// --- Response schemas, one per provider ------------------------------------

struct WhoisRecord {
  Date registered_on{};
  std::optional<std::string> registrar;
  friend bool operator==(const WhoisRecord&, const WhoisRecord&) = default;
};

struct SslRecord {
  Date not_before{};
  bool trusted_chain = false;
  std::optional<std::string> issuer;
  friend bool operator==(const SslRecord&, const SslRecord&) = default;
};

struct HostRecord {
  std::optional<std::int64_t> asn;
  std::optional<std::string> isp;
  std::optional<std::string> country;
  friend bool operator==(const HostRecord&, const HostRecord&) = default;
};

struct ReputationRecord {
  int dnsbl_hits = 0;
  double abuse_index = 0.0;
  friend bool operator==(const ReputationRecord&, const ReputationRecord&) = default;
};

struct GeoRecord {
  std::optional<std::int64_t> asn;
  std::optional<std::string> isp;
  std::optional<std::string> country;
  std::optional<std::string> city;
  std::optional<std::string> region;
  std::optional<std::string> timezone;
  std::optional<double> lat;
  std::optional<double> lon;
  std::optional<std::string> connection_type;  // mobile|fibre|dsl|satellite|datacenter|unknown
  friend bool operator==(const GeoRecord&, const GeoRecord&) = default;
};

struct AnonymizationRecord {
  bool vpn = false;
  bool proxy = false;
  bool tor = false;
  bool hosting = false;
  std::optional<std::int64_t> resolver_asn;  // ASN of the DNS resolver seen for this client
  friend bool operator==(const AnonymizationRecord&, const AnonymizationRecord&) = default;
};

struct AbuseRecord {
  double score = 0.0;  // normalized to [0,1]
  friend bool operator==(const AbuseRecord&, const AbuseRecord&) = default;
};

struct MxRecord {
  bool has_mx = false;
  friend bool operator==(const MxRecord&, const MxRecord&) = default;
};

struct DisposableRecord {
  bool disposable = false;
  friend bool operator==(const DisposableRecord&, const DisposableRecord&) = default;
};

struct PhoneRecord {
  std::optional<std::string> carrier;
  std::optional<std::string> country;
  int fraud_reports = 0;  // complaints held by the registry
  int feed_hits = 0;      // listings on telephone fraud feeds
  friend bool operator==(const PhoneRecord&, const PhoneRecord&) = default;
};

struct BusinessRecord {
  bool registered = false;
  std::optional<std::string> jurisdiction;
  std::vector<std::string> known_fraud_names;
  std::optional<std::string> website;
  friend bool operator==(const BusinessRecord&, const BusinessRecord&) = default;
};

// Alternative index equals the ProviderKind value.
using Payload = std::variant<WhoisRecord, SslRecord, HostRecord, ReputationRecord, GeoRecord, AnonymizationRecord,
                             AbuseRecord, MxRecord, DisposableRecord, PhoneRecord, BusinessRecord>;

ProviderKind payload_provider(const Payload& p) noexcept;

// Schema serializer. payload_from_json(k, payload_to_json(p)) == p for every valid p.
nlohmann::json payload_to_json(const Payload& payload);
// Throws Error{SchemaViolation}.
Payload payload_from_json(ProviderKind kind, const nlohmann::json& j);

struct ProviderOutcome {
  CallStatus status = CallStatus::Failed;
  std::optional<Payload> payload;  // present iff status == Ok
  std::int64_t elapsed_ms = 0;
  std::string detail;              // diagnostic for Failed/TimedOut
};

// --- Backends ---------------------------------------------------------------

class IntelBackend {
 public:
  virtual ~IntelBackend() = default;
  // Blocking fetch. Must return promptly once `stop` is requested; the result
  // of a stopped call is discarded by the caller.
  virtual ProviderOutcome fetch(ProviderKind provider, const std::string& key, std::stop_token stop) const = 0;
};

struct FixtureEntry {
  ProviderKind provider = ProviderKind::Whois;
  std::string key;
  std::optional<Payload> response;  // required unless fail
  int delay_ms = 0;
  bool fail = false;
};

class FixtureSet {
 public:
  // Throws Error{DuplicateKey} if (provider, key) already exists.
  void add(FixtureEntry entry);
  const FixtureEntry* find(ProviderKind provider, std::string_view key) const;
  std::size_t size() const { return entries_.size(); }
  const std::vector<FixtureEntry>& entries() const { return entries_; }

 private:
  std::vector<FixtureEntry> entries_;
};

// JSON Lines, one FixtureEntry per line (see docs/fixture-schema.md).
// Throws Error{ParseError | DuplicateKey | SchemaViolation}.
FixtureSet load_fixtures(const std::string& path);
FixtureSet parse_fixtures(std::string_view text, std::string_view source_name = "<memory>");
void load_fixtures_into(FixtureSet& set, const std::string& path);
nlohmann::json fixture_to_json(const FixtureEntry& entry);

std::unordered_set<std::string> load_domain_list(const std::string& path);

// Serves fixture entries. Keys with no entry fail, except DisposableDomain
// which answers from the bundled domain list.
class FixtureBackend final : public IntelBackend {
 public:
  FixtureBackend(FixtureSet fixtures, std::unordered_set<std::string> disposable_domains = {});
  ProviderOutcome fetch(ProviderKind provider, const std::string& key, std::stop_token stop) const override;

 private:
  FixtureSet fixtures_;
  std::unordered_set<std::string> disposable_;
};

// Placeholder for live network feeds. Every remote provider reports Failed so
// the pipeline degrades to zero-vector fallbacks; DisposableDomain still uses
// the bundled list.
class LiveBackend final : public IntelBackend {
 public:
  explicit LiveBackend(std::unordered_set<std::string> disposable_domains = {});
  ProviderOutcome fetch(ProviderKind provider, const std::string& key, std::stop_token stop) const override;

 private:
  std::unordered_set<std::string> disposable_;
};

// --- Deadline-bounded calls -------------------------------------------------

struct CallState;

// A call running on its own worker. Destroying it cancels the backend.
class PendingCall {
 public:
  using TimePoint = std::chrono::steady_clock::time_point;

  PendingCall(std::shared_ptr<CallState> state, TimePoint start, int deadline_ms);
  PendingCall(PendingCall&&) noexcept = default;
  PendingCall& operator=(PendingCall&&) noexcept = default;
  ~PendingCall();

  // Blocks until the call finishes or its own deadline passes.
  ProviderOutcome wait();
  // As wait(), but gives up at `join` if that comes first.
  ProviderOutcome wait_until(TimePoint join);

 private:
  std::shared_ptr<CallState> state_;
  TimePoint start_;
  int deadline_ms_ = 0;
};

class IntelClient {
 public:
  explicit IntelClient(std::shared_ptr<const IntelBackend> backend);

  // Starts the call and returns immediately. Throws Error{InvalidArgument} if deadline_ms <= 0.
  PendingCall start(ProviderKind provider, std::string key, int deadline_ms = kDefaultCallDeadlineMs) const;

  // Returns within deadline_ms plus scheduling slack. A late backend result is discarded.
  ProviderOutcome call_with_deadline(ProviderKind provider, const std::string& key,
                                     int deadline_ms = kDefaultCallDeadlineMs) const;
  // Same, with the provider named as a string. Throws Error{UnknownProvider}.
  ProviderOutcome call_with_deadline(std::string_view provider, const std::string& key,
                                     int deadline_ms = kDefaultCallDeadlineMs) const;

  // Dispatches on the entity's lookup key. Throws Error{InapplicableKind}.
  ProviderOutcome lookup(ProviderKind provider, const NormalizedEntity& entity,
                         int deadline_ms = kDefaultCallDeadlineMs) const;

 private:
  std::shared_ptr<const IntelBackend> backend_;
};

// Which entity kinds a provider serves (GeoAsn, AnonymizationCheck and
// AbuseScore are keyed by client IP and serve none).
bool provider_applies(ProviderKind provider, EntityKind kind) noexcept;
// Key a provider is queried with for this entity. Throws Error{InapplicableKind}.
std::string lookup_key(ProviderKind provider, const NormalizedEntity& entity);

// Whole days between a WHOIS registration date and the query date, floored at 0.
long domain_age_days(const WhoisRecord& record, Date as_of);

}  // namespace guardsec
