#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "guardsec/time.hpp"

namespace guardsec {

enum class EntityKind { Url, Domain, Email, Phone, Business };

inline constexpr EntityKind kAllEntityKinds[] = {EntityKind::Url, EntityKind::Domain, EntityKind::Email,
                                                 EntityKind::Phone, EntityKind::Business};

std::string_view to_string(EntityKind kind) noexcept;
// Accepts the lower-case names produced by to_string. Throws Error{InvalidArgument}.
EntityKind entity_kind_from_string(std::string_view name);

inline constexpr std::size_t kMaxEntityLength = 2048;

struct RawEntity {
  std::string text;
  Timestamp submitted_at{};
};

struct UrlParts {
  std::string scheme;
  std::string netloc;  // lower-cased, default port removed, userinfo kept
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  // Host component of netloc: no userinfo, no port, brackets kept for IPv6.
  std::string host() const;

  friend bool operator==(const UrlParts&, const UrlParts&) = default;
};

struct EmailParts {
  std::string local;
  std::string domain;

  friend bool operator==(const EmailParts&, const EmailParts&) = default;
};

struct NormalizedEntity {
  EntityKind kind = EntityKind::Business;
  std::string canonical;
  std::optional<UrlParts> url_parts;
  std::optional<std::string> phone_e164;
  std::optional<EmailParts> email_parts;
  std::optional<std::vector<std::string>> business_tokens;

  friend bool operator==(const NormalizedEntity&, const NormalizedEntity&) = default;
};

// Auto-detection for a single free-form input box.
// Precedence: Url > Email > Phone > Domain > Business (the fallback).
EntityKind detect_kind(const RawEntity& raw);

NormalizedEntity parse_url(const RawEntity& raw);
NormalizedEntity normalize_email(const RawEntity& raw);
// `default_country` is an ISO-3166 alpha-2 code used for numbers written in
// national format. Empty means only international forms are accepted.
NormalizedEntity normalize_phone(const RawEntity& raw, std::string_view default_country = "");
NormalizedEntity normalize_domain(const RawEntity& raw);
NormalizedEntity normalize_business_name(const RawEntity& raw,
                                         std::span<const std::string> legal_suffixes = {});

struct NormalizeOptions {
  std::string default_country;
  // Empty uses the built-in stop list.
  std::vector<std::string> legal_suffixes;
};

NormalizedEntity normalize(EntityKind kind, const RawEntity& raw, const NormalizeOptions& options = {});

// Built-in copy of data/legal_suffixes.txt.
std::span<const std::string> default_legal_suffixes();
// One suffix per line, '#' comments and blank lines ignored.
std::vector<std::string> load_legal_suffixes(const std::string& path);

// Helpers shared with feature extraction and the audit module.
bool is_valid_domain_name(std::string_view name);
bool is_ipv4_literal(std::string_view host);
bool is_ipv6_literal(std::string_view host);  // accepts with or without brackets

// Reassembles parts into a URL string; parse_url of the result yields the same parts.
std::string to_url_string(const UrlParts& parts);

}  // namespace guardsec
