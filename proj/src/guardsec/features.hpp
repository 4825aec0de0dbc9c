#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "guardsec/entity.hpp"

namespace guardsec {

struct LexicalFeatures {
  std::size_t length = 0;
  double entropy_bits = 0.0;
  std::size_t special_char_count = 0;
  bool has_ip_literal = false;
  std::size_t subdomain_count = 0;  // explanation only, never scored

  friend bool operator==(const LexicalFeatures&, const LexicalFeatures&) = default;
};

struct HostFeatures {
  std::optional<std::int64_t> asn;
  std::optional<std::string> isp_name;
  std::optional<std::string> country;  // ISO-3166 alpha-2, upper case

  friend bool operator==(const HostFeatures&, const HostFeatures&) = default;
};

struct WhoisFeatures {
  std::optional<long> domain_age_days;
  std::optional<std::string> registrar;

  friend bool operator==(const WhoisFeatures&, const WhoisFeatures&) = default;
};

struct SslFeatures {
  std::optional<long> cert_age_days;
  std::optional<bool> trusted_ca;

  friend bool operator==(const SslFeatures&, const SslFeatures&) = default;
};

struct ReputationFeatures {
  int dnsbl_hits = 0;
  double abuse_index = 0.0;         // [0,1]
  double user_report_weight = 0.0;  // decayed community report weight

  friend bool operator==(const ReputationFeatures&, const ReputationFeatures&) = default;
};

struct BusinessFeatures {
  double name_similarity = 0.0;      // against known fraudulent entity names
  double registration_signal = 0.0;  // 1 = registered
  double web_signal = 0.0;           // 1 = has an associated website

  friend bool operator==(const BusinessFeatures&, const BusinessFeatures&) = default;
};

// Sub-vector slots of the feature vector.
enum class Slot { Lex, Host, Whois, Ssl, Rep, Business };
inline constexpr std::size_t kSlotCount = 6;
inline constexpr Slot kAllSlots[] = {Slot::Lex, Slot::Host, Slot::Whois, Slot::Ssl, Slot::Rep, Slot::Business};
std::string_view to_string(Slot slot) noexcept;

// Scored features, one per row of the applicability table.
enum class Feature {
  Length,
  Entropy,
  SpecialChars,
  IpLiteral,
  DomainAge,
  AsnIsp,
  Country,
  CertAge,
  TrustedCa,
  NameMatch,
  RegSignal,
  Dnsbl,
  AbuseIndex,
  UserReports,
};
inline constexpr std::size_t kFeatureCount = 14;
inline constexpr Feature kAllFeatures[] = {
    Feature::Length,  Feature::Entropy,   Feature::SpecialChars, Feature::IpLiteral, Feature::DomainAge,
    Feature::AsnIsp,  Feature::Country,   Feature::CertAge,      Feature::TrustedCa, Feature::NameMatch,
    Feature::RegSignal, Feature::Dnsbl, Feature::AbuseIndex, Feature::UserReports,
};
std::string_view to_string(Feature feature) noexcept;
std::optional<Feature> feature_from_string(std::string_view name) noexcept;
Slot slot_of(Feature feature) noexcept;

enum class Applicability { Required, Optional, Inapplicable };
enum class Availability { Fresh, Fallback, Inapplicable };
std::string_view to_string(Applicability a) noexcept;
std::string_view to_string(Availability a) noexcept;

struct ApplicabilityMask {
  std::array<Applicability, kFeatureCount> features{};

  Applicability operator[](Feature f) const { return features[static_cast<std::size_t>(f)]; }
  // Strongest mark among the slot's features.
  Applicability slot(Slot s) const;
};

ApplicabilityMask applicability_mask(EntityKind kind);

// Result of the remote sub-query feeding a slot.
enum class CallStatus { Ok, TimedOut, Failed };
std::string_view to_string(CallStatus s) noexcept;

struct SlotOutcomes {
  std::optional<CallStatus> host;
  std::optional<CallStatus> whois;
  std::optional<CallStatus> ssl;
  std::optional<CallStatus> rep;
  std::optional<CallStatus> business;
};

struct FeatureVector {
  EntityKind kind = EntityKind::Url;
  std::optional<LexicalFeatures> lex;
  std::optional<HostFeatures> host;
  std::optional<WhoisFeatures> whois;
  std::optional<SslFeatures> ssl;
  ReputationFeatures rep;
  std::optional<BusinessFeatures> business;
  std::array<Availability, kSlotCount> availability{};

  Availability availability_of(Slot s) const { return availability[static_cast<std::size_t>(s)]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Base-2 Shannon entropy of the byte histogram; 0 for length <= 1.
double shannon_entropy(std::string_view text);

// Characters counted by special_char_count.
inline constexpr std::string_view kSpecialChars = "-_@%&=?~+#";

LexicalFeatures extract_lexical(const NormalizedEntity& entity);

// Total: never throws. Remote slots whose outcome is not Ok (or missing) are
// replaced by zero-vectors and flagged Fallback; slots the kind does not use
// are cleared and flagged Inapplicable. The local community report weight in
// `rep` survives a reputation fallback.
FeatureVector assemble_features(EntityKind kind, std::optional<LexicalFeatures> lex, std::optional<HostFeatures> host,
                                std::optional<WhoisFeatures> whois, std::optional<SslFeatures> ssl,
                                ReputationFeatures rep, std::optional<BusinessFeatures> business,
                                const SlotOutcomes& outcomes);

}  // namespace guardsec
