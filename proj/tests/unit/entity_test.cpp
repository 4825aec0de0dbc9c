#include <random>

#include "doctest.h"
#include "guardsec/entity.hpp"
#include "guardsec/error.hpp"

using namespace guardsec;

namespace {

RawEntity raw(std::string text) {
  return RawEntity{std::move(text), {}};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("detect_kind follows url > email > phone > domain > business") {
  CHECK(detect_kind(raw("https://bank.example/login")) == EntityKind::Url);
  CHECK(detect_kind(raw("alice@mail.example")) == EntityKind::Email);
  CHECK(detect_kind(raw("+242 06 123 4567")) == EntityKind::Phone);
  CHECK(detect_kind(raw("00242061234567")) == EntityKind::Phone);
  CHECK(detect_kind(raw("Bank.Example.")) == EntityKind::Domain);
  CHECK(detect_kind(raw("Acme Trading SARL")) == EntityKind::Business);
  CHECK(detect_kind(raw("  shop.example  ")) == EntityKind::Domain);
}

TEST_CASE("url normalization lower-cases the authority and drops default ports") {
  const auto e = parse_url(raw("HTTPS://User@Bank.EXAMPLE:443/Path/A?q=1#Top"));
  CHECK(e.kind == EntityKind::Url);
  CHECK(e.canonical == "https://user@bank.example/Path/A?q=1#Top");
  REQUIRE(e.url_parts);
  CHECK(e.url_parts->host() == "bank.example");
  CHECK(e.url_parts->query == std::optional<std::string>("q=1"));
  CHECK(e.url_parts->fragment == std::optional<std::string>("Top"));

  CHECK(parse_url(raw("http://shop.example:8080")).canonical == "http://shop.example:8080");
  CHECK(parse_url(raw("http://[2001:db8::1]:80/x")).url_parts->host() == "[2001:db8::1]");
}

TEST_CASE("malformed urls are rejected with MalformedUrl") {
  for (const char* bad : {"bank.example/login", "https://", "http://a b.example", "http://[2001:db8::1",
                          "http://host.example:80x/", "http://[::1]x/"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { parse_url(raw(bad)); }) == ErrorCode::MalformedUrl);
  }
}

TEST_CASE("url round trip: parse(to_url_string(parts)) == parts") {
  std::mt19937 rng(7);
  const std::vector<std::string> schemes{"http", "https", "ftp", "wss"};
  const std::vector<std::string> hosts{"bank.example", "a.b.c.example", "192.0.2.1", "[2001:db8::5]"};
  const std::vector<std::string> ports{"", ":8080", ":443", ":80"};
  const std::vector<std::string> paths{"", "/", "/a/b", "/login.php", "/%7Euser"};
  const std::vector<std::string> queries{"", "?x=1", "?a=b&c=d", "?"};
  const std::vector<std::string> frags{"", "#f", "#"};
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  for (int i = 0; i < 500; ++i) {
    const std::string text = pick(schemes) + "://" + pick(hosts) + pick(ports) + pick(paths) + pick(queries) +
                             pick(frags);
    CAPTURE(text);
    const auto first = parse_url(raw(text));
    const auto second = parse_url(raw(to_url_string(*first.url_parts)));
    CHECK(first == second);
  }
}

TEST_CASE("email normalization lower-cases only the domain") {
  const auto e = normalize_email(raw(" Alice.B@Mail.Example. "));
  CHECK(e.canonical == "Alice.B@mail.example");
  REQUIRE(e.email_parts);
  CHECK(e.email_parts->local == "Alice.B");
  CHECK(e.email_parts->domain == "mail.example");
  for (const char* bad : {"no-at.example", "a@@b.example", "@mail.example", "a@localhost", "a b@mail.example"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { normalize_email(raw(bad)); }) == ErrorCode::MalformedEmail);
  }
}

TEST_CASE("phone numbers normalize to E.164") {
  CHECK(normalize_phone(raw("+242 06 123 4567")).canonical == "+242061234567");
  CHECK(normalize_phone(raw("00 225 05 00 00 00 01")).canonical == "+2250500000001");
  CHECK(normalize_phone(raw("06 123 4567"), "CG").canonical == "+242061234567");
  CHECK(normalize_phone(raw("0803 123 4567"), "ng").canonical == "+2348031234567");
  CHECK(normalize_phone(raw("(555) 010-0000"), "US").phone_e164 == std::optional<std::string>("+15550100000"));
  CHECK(code_of([] { normalize_phone(raw("06 123 4567")); }) == ErrorCode::MalformedPhone);
  CHECK(code_of([] { normalize_phone(raw("+12345")); }) == ErrorCode::MalformedPhone);
  CHECK(code_of([] { normalize_phone(raw("+1234567890123456")); }) == ErrorCode::MalformedPhone);
  CHECK(code_of([] { normalize_phone(raw("+242-06-ABC")); }) == ErrorCode::MalformedPhone);
}

TEST_CASE("domain normalization") {
  CHECK(normalize_domain(raw("Shop.Example.")).canonical == "shop.example");
  for (const char* bad : {"localhost", "-bad.example", "bad-.example", "a..example", "sp ace.example"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { normalize_domain(raw(bad)); }) == ErrorCode::MalformedDomain);
  }
  CHECK_FALSE(is_valid_domain_name(std::string(64, 'a') + ".example"));
  CHECK(is_valid_domain_name(std::string(63, 'a') + ".example"));
}

TEST_CASE("business names drop legal suffixes and punctuation") {
  auto e = normalize_business_name(raw("ACME Trading S.A.R.L."));
  CHECK(e.canonical == "acme trading");
  CHECK(e.business_tokens == std::optional<std::vector<std::string>>({"acme", "trading"}));
  CHECK(normalize_business_name(raw("M.T.N. Mobile Money Ltd")).canonical == "mtn mobile money");
  CHECK(normalize_business_name(raw("Société Générale SA")).canonical == "société générale");
  CHECK(code_of([] { normalize_business_name(raw("S.A.R.L. Ltd.")); }) == ErrorCode::EmptyAfterNormalization);

  const std::vector<std::string> custom{"ets"};
  CHECK(normalize_business_name(raw("Ets Kouame"), custom).canonical == "kouame");
}

TEST_CASE("bundled legal suffix list matches the built-in copy") {
  const auto loaded = load_legal_suffixes(GUARDSEC_SOURCE_DIR "/data/legal_suffixes.txt");
  const auto builtin = default_legal_suffixes();
  CHECK(std::vector<std::string>(builtin.begin(), builtin.end()) == loaded);
}

TEST_CASE("shared input invariants") {
  for (EntityKind k : kAllEntityKinds) {
    CAPTURE(to_string(k));
    CHECK(code_of([&] { normalize(k, raw("   ")); }) == ErrorCode::EmptyInput);
    CHECK(code_of([&] { normalize(k, raw(std::string(kMaxEntityLength + 1, 'a'))); }) == ErrorCode::InputTooLong);
    CHECK(entity_kind_from_string(to_string(k)) == k);
  }
  CHECK(code_of([] { entity_kind_from_string("fax"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("ip literal helpers") {
  CHECK(is_ipv4_literal("192.0.2.1"));
  CHECK_FALSE(is_ipv4_literal("256.0.0.1"));
  CHECK_FALSE(is_ipv4_literal("1.2.3"));
  CHECK_FALSE(is_ipv4_literal("1.2.3.4.5"));
  CHECK(is_ipv6_literal("[2001:db8::1]"));
  CHECK(is_ipv6_literal("::1"));
  CHECK_FALSE(is_ipv6_literal("bank.example"));
}

TEST_CASE("normalization is idempotent on canonical forms") {
  const std::vector<std::pair<EntityKind, std::string>> inputs{
      {EntityKind::Url, "HTTP://Shop.Example:80/a?b#c"},
      {EntityKind::Domain, "Shop.Example."},
      {EntityKind::Email, "Bob@Mail.Example"},
      {EntityKind::Phone, "00 242 06 123 4567"},
      {EntityKind::Business, "Acme Trading Ltd"},
  };
  for (const auto& [k, text] : inputs) {
    const auto once = normalize(k, raw(text));
    CHECK(normalize(k, raw(once.canonical)) == once);
  }
}
