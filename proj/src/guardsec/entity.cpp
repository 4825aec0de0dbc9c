#include "guardsec/entity.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "guardsec/error.hpp"

namespace guardsec {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_digit(char c) {
  return c >= '0' && c <= '9';
}

bool is_ascii_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 && static_cast<unsigned char>(c) < 0x80;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Trimmed text after the RawEntity invariants have been checked.
std::string_view checked_text(const RawEntity& raw) {
  const std::string_view t = trim(raw.text);
  if (t.empty()) {
    throw Error(ErrorCode::EmptyInput, "entity is empty");
  }
  if (t.size() > kMaxEntityLength) {
    throw Error(ErrorCode::InputTooLong,
                "entity exceeds " + std::to_string(kMaxEntityLength) + " characters");
  }
  return t;
}

bool has_space_or_control(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u <= 0x20 || u == 0x7f;
  });
}

// Length of a leading "scheme://", or npos if there is none.
std::size_t scheme_length(std::string_view s) {
  const std::size_t sep = s.find("://");
  if (sep == std::string_view::npos || sep == 0) return std::string_view::npos;
  if (!std::isalpha(static_cast<unsigned char>(s[0]))) return std::string_view::npos;
  for (std::size_t i = 1; i < sep; ++i) {
    const char c = s[i];
    if (!is_ascii_alnum(c) && c != '+' && c != '-' && c != '.') return std::string_view::npos;
  }
  return sep;
}

std::optional<std::string_view> default_port(std::string_view scheme) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 5> kDefaults{{
      {"http", "80"}, {"https", "443"}, {"ftp", "21"}, {"ws", "80"}, {"wss", "443"}}};
  for (const auto& [s, p] : kDefaults) {
    if (s == scheme) return p;
  }
  return std::nullopt;
}

struct HostPort {
  std::string_view host;
  std::string_view port;  // empty if absent
};

HostPort split_host_port(std::string_view hostport) {
  HostPort hp;
  if (!hostport.empty() && hostport.front() == '[') {
    const std::size_t close = hostport.find(']');
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::MalformedUrl, "unterminated IPv6 literal");
    }
    hp.host = hostport.substr(0, close + 1);
    const std::string_view rest = hostport.substr(close + 1);
    if (!rest.empty()) {
      if (rest.front() != ':') throw Error(ErrorCode::MalformedUrl, "garbage after IPv6 literal");
      hp.port = rest.substr(1);
    }
  } else {
    const std::size_t colon = hostport.rfind(':');
    if (colon == std::string_view::npos) {
      hp.host = hostport;
    } else {
      hp.host = hostport.substr(0, colon);
      hp.port = hostport.substr(colon + 1);
    }
  }
  if (!std::all_of(hp.port.begin(), hp.port.end(), is_digit)) {
    throw Error(ErrorCode::MalformedUrl, "non-numeric port");
  }
  return hp;
}

struct CountryDialing {
  std::string_view iso;
  std::string_view calling_code;
  bool strip_trunk_zero;
};

// National-format numbers need a calling code. Countries whose international
// form keeps the leading 0 (Congo, Côte d'Ivoire, Gabon) do not strip it.
constexpr std::array<CountryDialing, 18> kDialingTable{{
    {"CG", "242", false}, {"CD", "243", true},  {"CM", "237", false}, {"CI", "225", false},
    {"GA", "241", false}, {"SN", "221", false}, {"BJ", "229", false}, {"TG", "228", false},
    {"NG", "234", true},  {"GH", "233", true},  {"KE", "254", true},  {"ZA", "27", true},
    {"RW", "250", true},  {"FR", "33", true},   {"BE", "32", true},   {"GB", "44", true},
    {"US", "1", false},   {"CA", "1", false},
}};

bool is_phone_separator(char c) {
  return c == ' ' || c == '-' || c == '(' || c == ')' || c == '\t';
}

std::string strip_phone_separators(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (!is_phone_separator(c)) out.push_back(c);
  }
  return out;
}

bool looks_like_phone(std::string_view trimmed) {
  const std::string compact = strip_phone_separators(trimmed);
  std::string_view digits = compact;
  if (!digits.empty() && digits.front() == '+') {
    digits.remove_prefix(1);
  } else if (digits.starts_with("00")) {
    digits.remove_prefix(2);
  }
  return digits.size() >= 7 && digits.size() <= 15 && std::all_of(digits.begin(), digits.end(), is_digit);
}

std::string domain_key(std::string_view s) {
  std::string d = ascii_lower(s);
  if (!d.empty() && d.back() == '.') d.pop_back();
  return d;
}

bool email_shape(std::string_view t, EmailParts* out) {
  if (std::count(t.begin(), t.end(), '@') != 1 || has_space_or_control(t)) return false;
  const std::size_t at = t.find('@');
  const std::string_view local = t.substr(0, at);
  if (local.empty() || local.size() > 64) return false;
  std::string domain = domain_key(t.substr(at + 1));
  if (!is_valid_domain_name(domain)) return false;
  if (out != nullptr) {
    out->local = std::string(local);
    out->domain = std::move(domain);
  }
  return true;
}

const std::vector<std::string>& builtin_suffixes() {
  static const std::vector<std::string> kSuffixes{
      "ltd", "sarl", "inc", "sa", "llc", "sas", "sasu", "sarlu", "plc", "gmbh", "corp", "limited", "incorporated",
  };
  return kSuffixes;
}

}  // namespace

std::string_view to_string(EntityKind kind) noexcept {
  switch (kind) {
    case EntityKind::Url: return "url";
    case EntityKind::Domain: return "domain";
    case EntityKind::Email: return "email";
    case EntityKind::Phone: return "phone";
    case EntityKind::Business: return "business";
  }
  return "business";
}

EntityKind entity_kind_from_string(std::string_view name) {
  const std::string lower = ascii_lower(name);
  for (EntityKind k : kAllEntityKinds) {
    if (to_string(k) == lower) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown entity kind '" + std::string(name) + "'");
}

std::string UrlParts::host() const {
  std::string_view hostport = netloc;
  const std::size_t at = hostport.rfind('@');
  if (at != std::string_view::npos) hostport.remove_prefix(at + 1);
  return std::string(split_host_port(hostport).host);
}

bool is_valid_domain_name(std::string_view name) {
  if (name.empty() || name.size() > 253) return false;
  std::size_t labels = 0;
  std::size_t start = 0;
  while (start <= name.size()) {
    std::size_t end = name.find('.', start);
    if (end == std::string_view::npos) end = name.size();
    const std::string_view label = name.substr(start, end - start);
    if (label.empty() || label.size() > 63) return false;
    if (label.front() == '-' || label.back() == '-') return false;
    for (char c : label) {
      if (!is_ascii_alnum(c) && c != '-') return false;
    }
    ++labels;
    start = end + 1;
  }
  return labels >= 2;
}

bool is_ipv4_literal(std::string_view host) {
  int parts = 0;
  std::size_t i = 0;
  while (true) {
    std::size_t digits = 0;
    int value = 0;
    while (i < host.size() && is_digit(host[i]) && digits < 4) {
      value = value * 10 + (host[i] - '0');
      ++digits;
      ++i;
    }
    if (digits == 0 || digits > 3 || value > 255) return false;
    ++parts;
    if (i == host.size()) break;
    if (host[i] != '.' || parts == 4) return false;
    ++i;
  }
  return parts == 4;
}

bool is_ipv6_literal(std::string_view host) {
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  if (host.empty() || host.find(':') == std::string_view::npos) return false;
  const std::string copy(host);
  in6_addr addr{};
  return inet_pton(AF_INET6, copy.c_str(), &addr) == 1;
}

std::string to_url_string(const UrlParts& parts) {
  std::string out = parts.scheme + "://" + parts.netloc + parts.path;
  if (parts.query) out += "?" + *parts.query;
  if (parts.fragment) out += "#" + *parts.fragment;
  return out;
}

EntityKind detect_kind(const RawEntity& raw) {
  const std::string_view t = trim(raw.text);
  if (scheme_length(t) != std::string_view::npos) return EntityKind::Url;
  if (email_shape(t, nullptr)) return EntityKind::Email;
  if (looks_like_phone(t)) return EntityKind::Phone;
  if (!has_space_or_control(t) && is_valid_domain_name(domain_key(t))) return EntityKind::Domain;
  return EntityKind::Business;
}

NormalizedEntity parse_url(const RawEntity& raw) {
  const std::string_view t = checked_text(raw);
  if (has_space_or_control(t)) {
    throw Error(ErrorCode::MalformedUrl, "URL contains whitespace or control characters");
  }
  const std::size_t slen = scheme_length(t);
  if (slen == std::string_view::npos) {
    throw Error(ErrorCode::MalformedUrl, "URL has no scheme");
  }
  UrlParts parts;
  parts.scheme = ascii_lower(t.substr(0, slen));

  const std::string_view rest = t.substr(slen + 3);
  const std::size_t auth_end = std::min(rest.find_first_of("/?#"), rest.size());
  const std::string authority = ascii_lower(rest.substr(0, auth_end));

  std::string_view hostport = authority;
  std::string_view userinfo;
  if (const std::size_t at = hostport.rfind('@'); at != std::string_view::npos) {
    userinfo = hostport.substr(0, at);
    hostport.remove_prefix(at + 1);
  }
  const HostPort hp = split_host_port(hostport);
  if (hp.host.empty() || hp.host == "[]") {
    throw Error(ErrorCode::MalformedUrl, "URL has an empty host");
  }
  parts.netloc.clear();
  if (!userinfo.empty() || authority.find('@') != std::string::npos) {
    parts.netloc.append(userinfo).push_back('@');
  }
  parts.netloc.append(hp.host);
  const auto dflt = default_port(parts.scheme);
  if (!hp.port.empty() && !(dflt && *dflt == hp.port)) {
    parts.netloc.append(":").append(hp.port);
  }

  std::string_view tail = rest.substr(auth_end);
  if (const std::size_t hash = tail.find('#'); hash != std::string_view::npos) {
    parts.fragment = std::string(tail.substr(hash + 1));
    tail = tail.substr(0, hash);
  }
  if (const std::size_t q = tail.find('?'); q != std::string_view::npos) {
    parts.query = std::string(tail.substr(q + 1));
    tail = tail.substr(0, q);
  }
  parts.path = std::string(tail);

  NormalizedEntity e;
  e.kind = EntityKind::Url;
  e.canonical = to_url_string(parts);
  e.url_parts = std::move(parts);
  return e;
}

NormalizedEntity normalize_email(const RawEntity& raw) {
  const std::string_view t = checked_text(raw);
  EmailParts parts;
  if (!email_shape(t, &parts)) {
    throw Error(ErrorCode::MalformedEmail, "'" + std::string(t) + "' is not a valid email address");
  }
  NormalizedEntity e;
  e.kind = EntityKind::Email;
  e.canonical = parts.local + "@" + parts.domain;
  e.email_parts = std::move(parts);
  return e;
}

NormalizedEntity normalize_phone(const RawEntity& raw, std::string_view default_country) {
  const std::string_view t = checked_text(raw);
  std::string compact = strip_phone_separators(t);
  std::string digits;
  if (!compact.empty() && compact.front() == '+') {
    digits = compact.substr(1);
  } else if (compact.starts_with("00")) {
    digits = compact.substr(2);
  } else {
    const std::string iso = [&] {
      std::string s(default_country);
      for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return s;
    }();
    const auto it = std::find_if(kDialingTable.begin(), kDialingTable.end(),
                                 [&](const CountryDialing& d) { return d.iso == iso; });
    if (it == kDialingTable.end()) {
      throw Error(ErrorCode::MalformedPhone, "national-format number without a known default country");
    }
    std::string_view national = compact;
    if (it->strip_trunk_zero && national.starts_with('0')) national.remove_prefix(1);
    digits = std::string(it->calling_code) + std::string(national);
  }
  if (!std::all_of(digits.begin(), digits.end(), is_digit)) {
    throw Error(ErrorCode::MalformedPhone, "phone number contains non-digit characters");
  }
  if (digits.size() < 7 || digits.size() > 15) {
    throw Error(ErrorCode::MalformedPhone,
                "phone number has " + std::to_string(digits.size()) + " digits, expected 7-15");
  }
  NormalizedEntity e;
  e.kind = EntityKind::Phone;
  e.canonical = "+" + digits;
  e.phone_e164 = e.canonical;
  return e;
}

NormalizedEntity normalize_domain(const RawEntity& raw) {
  const std::string_view t = checked_text(raw);
  std::string d = domain_key(t);
  if (has_space_or_control(d) || !is_valid_domain_name(d)) {
    throw Error(ErrorCode::MalformedDomain, "'" + std::string(t) + "' is not a valid domain name");
  }
  NormalizedEntity e;
  e.kind = EntityKind::Domain;
  e.canonical = std::move(d);
  return e;
}

NormalizedEntity normalize_business_name(const RawEntity& raw, std::span<const std::string> legal_suffixes) {
  const std::string_view t = checked_text(raw);
  if (legal_suffixes.empty()) legal_suffixes = default_legal_suffixes();

  std::string cleaned;
  cleaned.reserve(t.size());
  for (char c : t) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || is_ascii_alnum(c)) {
      cleaned.push_back(static_cast<char>(u < 0x80 ? std::tolower(u) : u));
    } else {
      cleaned.push_back(' ');
    }
  }

  std::vector<std::string> raw_tokens;
  for (std::size_t i = 0; i < cleaned.size();) {
    while (i < cleaned.size() && cleaned[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < cleaned.size() && cleaned[i] != ' ') ++i;
    if (i > start) raw_tokens.emplace_back(cleaned.substr(start, i - start));
  }

  // Dotted acronyms ("S.A.", "M.T.N.") become runs of one-letter tokens that
  // are joined back; dropping a suffix can create a new run, so iterate.
  std::vector<std::string> tokens = std::move(raw_tokens);
  while (true) {
    std::vector<std::string> merged;
    bool in_run = false;
    for (auto& tok : tokens) {
      const bool single = tok.size() == 1;
      if (single && in_run) {
        merged.back() += tok;
      } else {
        merged.push_back(std::move(tok));
      }
      in_run = single;
    }
    std::vector<std::string> kept;
    for (auto& tok : merged) {
      if (std::find(legal_suffixes.begin(), legal_suffixes.end(), tok) == legal_suffixes.end()) {
        kept.push_back(std::move(tok));
      }
    }
    const bool stable = kept.size() == merged.size();
    tokens = std::move(kept);
    if (stable) break;
  }
  if (tokens.empty()) {
    throw Error(ErrorCode::EmptyAfterNormalization, "business name is empty after normalization");
  }

  NormalizedEntity e;
  e.kind = EntityKind::Business;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) e.canonical.push_back(' ');
    e.canonical += tokens[i];
  }
  e.business_tokens = std::move(tokens);
  return e;
}

NormalizedEntity normalize(EntityKind kind, const RawEntity& raw, const NormalizeOptions& options) {
  switch (kind) {
    case EntityKind::Url: return parse_url(raw);
    case EntityKind::Domain: return normalize_domain(raw);
    case EntityKind::Email: return normalize_email(raw);
    case EntityKind::Phone: return normalize_phone(raw, options.default_country);
    case EntityKind::Business: return normalize_business_name(raw, options.legal_suffixes);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown entity kind");
}

std::span<const std::string> default_legal_suffixes() {
  return builtin_suffixes();
}

std::vector<std::string> load_legal_suffixes(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::ParseError, "cannot open legal suffix list '" + path + "'");
  }
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(ascii_lower(t));
  }
  return out;
}

}  // namespace guardsec
