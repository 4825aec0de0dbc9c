#include "guardsec/features.hpp"

#include <algorithm>
#include <cmath>

namespace guardsec {

namespace {

constexpr Applicability R = Applicability::Required;
constexpr Applicability O = Applicability::Optional;
constexpr Applicability X = Applicability::Inapplicable;

// Rows follow the Feature enum; columns are URL, Domain, Email, Phone, Business.
constexpr std::array<std::array<Applicability, 5>, kFeatureCount> kApplicability{{
    {R, R, R, R, R},  // length
    {R, R, R, X, O},  // entropy
    {R, R, R, X, X},  // special chars
    {R, X, X, X, X},  // IP literal
    {R, R, R, X, O},  // domain age
    {R, R, O, O, O},  // ASN / ISP
    {R, R, O, O, O},  // country
    {R, R, X, X, O},  // cert age
    {R, R, X, X, O},  // trusted CA
    {X, X, X, X, R},  // name match
    {X, X, X, X, R},  // registration signal
    {R, R, R, O, X},  // DNSBL hits
    {R, R, R, R, R},  // abuse index
    {R, R, R, R, R},  // user reports
}};

std::size_t column(EntityKind kind) {
  switch (kind) {
    case EntityKind::Url: return 0;
    case EntityKind::Domain: return 1;
    case EntityKind::Email: return 2;
    case EntityKind::Phone: return 3;
    case EntityKind::Business: return 4;
  }
  return 4;
}

std::size_t label_count(std::string_view host) {
  if (host.empty()) return 0;
  return static_cast<std::size_t>(std::count(host.begin(), host.end(), '.')) + 1;
}

bool slot_ok(const std::optional<CallStatus>& s) {
  return s.has_value() && *s == CallStatus::Ok;
}

}  // namespace

std::string_view to_string(Slot slot) noexcept {
  switch (slot) {
    case Slot::Lex: return "lex";
    case Slot::Host: return "host";
    case Slot::Whois: return "whois";
    case Slot::Ssl: return "ssl";
    case Slot::Rep: return "rep";
    case Slot::Business: return "business";
  }
  return "lex";
}

std::string_view to_string(Feature feature) noexcept {
  switch (feature) {
    case Feature::Length: return "length";
    case Feature::Entropy: return "entropy";
    case Feature::SpecialChars: return "special_chars";
    case Feature::IpLiteral: return "ip_literal";
    case Feature::DomainAge: return "domain_age";
    case Feature::AsnIsp: return "asn_isp";
    case Feature::Country: return "country";
    case Feature::CertAge: return "cert_age";
    case Feature::TrustedCa: return "trusted_ca";
    case Feature::NameMatch: return "name_match";
    case Feature::RegSignal: return "reg_signal";
    case Feature::Dnsbl: return "dnsbl";
    case Feature::AbuseIndex: return "abuse_index";
    case Feature::UserReports: return "user_reports";
  }
  return "length";
}

std::optional<Feature> feature_from_string(std::string_view name) noexcept {
  for (Feature f : kAllFeatures) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

Slot slot_of(Feature feature) noexcept {
  switch (feature) {
    case Feature::Length:
    case Feature::Entropy:
    case Feature::SpecialChars:
    case Feature::IpLiteral: return Slot::Lex;
    case Feature::DomainAge: return Slot::Whois;
    case Feature::AsnIsp:
    case Feature::Country: return Slot::Host;
    case Feature::CertAge:
    case Feature::TrustedCa: return Slot::Ssl;
    case Feature::NameMatch:
    case Feature::RegSignal: return Slot::Business;
    case Feature::Dnsbl:
    case Feature::AbuseIndex:
    case Feature::UserReports: return Slot::Rep;
  }
  return Slot::Lex;
}

std::string_view to_string(Applicability a) noexcept {
  switch (a) {
    case Applicability::Required: return "required";
    case Applicability::Optional: return "optional";
    case Applicability::Inapplicable: return "inapplicable";
  }
  return "inapplicable";
}

std::string_view to_string(Availability a) noexcept {
  switch (a) {
    case Availability::Fresh: return "fresh";
    case Availability::Fallback: return "fallback";
    case Availability::Inapplicable: return "inapplicable";
  }
  return "inapplicable";
}

std::string_view to_string(CallStatus s) noexcept {
  switch (s) {
    case CallStatus::Ok: return "ok";
    case CallStatus::TimedOut: return "timed_out";
    case CallStatus::Failed: return "failed";
  }
  return "failed";
}

Applicability ApplicabilityMask::slot(Slot s) const {
  Applicability best = Applicability::Inapplicable;
  for (Feature f : kAllFeatures) {
    if (slot_of(f) != s) continue;
    const Applicability a = (*this)[f];
    if (a == Applicability::Required) return a;
    if (a == Applicability::Optional) best = a;
  }
  return best;
}

ApplicabilityMask applicability_mask(EntityKind kind) {
  ApplicabilityMask mask;
  const std::size_t col = column(kind);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    mask.features[i] = kApplicability[i][col];
  }
  return mask;
}

double shannon_entropy(std::string_view text) {
  if (text.size() <= 1) return 0.0;
  std::array<std::size_t, 256> counts{};
  for (char c : text) ++counts[static_cast<unsigned char>(c)];
  const double n = static_cast<double>(text.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  // A single repeated symbol yields -1*log2(1) = -0.0.
  return h <= 0.0 ? 0.0 : h;
}

LexicalFeatures extract_lexical(const NormalizedEntity& entity) {
  LexicalFeatures lex;
  const std::string& s = entity.canonical;
  lex.length = s.size();
  lex.entropy_bits = shannon_entropy(s);
  lex.special_char_count = static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return kSpecialChars.find(c) != std::string_view::npos; }));

  std::string host;
  switch (entity.kind) {
    case EntityKind::Url:
      if (entity.url_parts) host = entity.url_parts->host();
      break;
    case EntityKind::Domain: host = entity.canonical; break;
    case EntityKind::Email:
      if (entity.email_parts) host = entity.email_parts->domain;
      break;
    case EntityKind::Phone:
    case EntityKind::Business: break;
  }
  const bool ip = is_ipv4_literal(host) || (host.starts_with('[') && is_ipv6_literal(host));
  lex.has_ip_literal = entity.kind == EntityKind::Url && ip;
  if (!ip) {
    const std::size_t labels = label_count(host);
    lex.subdomain_count = labels > 2 ? labels - 2 : 0;
  }
  return lex;
}

FeatureVector assemble_features(EntityKind kind, std::optional<LexicalFeatures> lex, std::optional<HostFeatures> host,
                                std::optional<WhoisFeatures> whois, std::optional<SslFeatures> ssl,
                                ReputationFeatures rep, std::optional<BusinessFeatures> business,
                                const SlotOutcomes& outcomes) {
  const ApplicabilityMask mask = applicability_mask(kind);
  FeatureVector fv;
  fv.kind = kind;

  auto set_flag = [&](Slot s, Availability a) { fv.availability[static_cast<std::size_t>(s)] = a; };

  // Lexical features are computed locally and never fail.
  set_flag(Slot::Lex, Availability::Fresh);
  fv.lex = lex.value_or(LexicalFeatures{});

  auto remote = [&](Slot s, const std::optional<CallStatus>& status, auto& target, auto&& value) {
    using T = typename std::decay_t<decltype(target)>::value_type;
    if (mask.slot(s) == Applicability::Inapplicable) {
      set_flag(s, Availability::Inapplicable);
      target.reset();
    } else if (slot_ok(status)) {
      set_flag(s, Availability::Fresh);
      target = value.value_or(T{});
    } else {
      set_flag(s, Availability::Fallback);
      target = T{};
    }
  };
  remote(Slot::Host, outcomes.host, fv.host, host);
  remote(Slot::Whois, outcomes.whois, fv.whois, whois);
  remote(Slot::Ssl, outcomes.ssl, fv.ssl, ssl);
  remote(Slot::Business, outcomes.business, fv.business, business);

  if (slot_ok(outcomes.rep)) {
    set_flag(Slot::Rep, Availability::Fresh);
    fv.rep = rep;
  } else {
    set_flag(Slot::Rep, Availability::Fallback);
    fv.rep = ReputationFeatures{0, 0.0, rep.user_report_weight};
  }
  return fv;
}

}  // namespace guardsec
