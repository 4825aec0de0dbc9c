#include <chrono>

#include "doctest.h"
#include "guardsec/error.hpp"
#include "guardsec/verdict.hpp"
#include "test_support.hpp"

using namespace guardsec;
using namespace guardsec::testing;

namespace {

RawEntity raw(std::string text) {
  return RawEntity{std::move(text), reference_time()};
}

const ProviderKind kUrlProviders[] = {ProviderKind::Whois, ProviderKind::SslCheck, ProviderKind::HostInfo,
                                      ProviderKind::Reputation};
const Slot kUrlSlots[] = {Slot::Whois, Slot::Ssl, Slot::Host, Slot::Rep};

Payload benign(ProviderKind p) {
  switch (p) {
    case ProviderKind::Whois: return WhoisRecord{parse_date("2001-06-01"), "R"};
    case ProviderKind::SslCheck: return SslRecord{parse_date("2025-11-01"), true, "CA"};
    case ProviderKind::HostInfo: return HostRecord{15133, "Example Hosting", "US"};
    default: return ReputationRecord{0, 0.0};
  }
}

}  // namespace

TEST_CASE("a slow provider degrades only its own slot within the per-call deadline") {
  FixtureSet set;
  set.add(fixture(ProviderKind::Whois, "slow.example", benign(ProviderKind::Whois), 2000));
  for (ProviderKind p : {ProviderKind::SslCheck, ProviderKind::HostInfo, ProviderKind::Reputation}) {
    set.add(fixture(p, "slow.example", benign(p), 100));
  }
  const auto engine = make_verdict_engine(std::move(set));
  const auto v = engine.verify(raw("https://slow.example/"));
  CHECK(v.degraded == std::vector<std::string>{"whois"});
  CHECK(v.elapsed_ms >= 1500);
  CHECK(v.elapsed_ms <= 1700);
  CHECK(v.features.availability_of(Slot::Whois) == Availability::Fallback);
  CHECK(v.features.availability_of(Slot::Ssl) == Availability::Fresh);
  for (const auto& t : v.providers) {
    if (t.provider == ProviderKind::Whois) {
      CHECK(t.status == CallStatus::TimedOut);
    } else {
      CHECK(t.status == CallStatus::Ok);
    }
  }
}

TEST_CASE("providers run in parallel") {
  FixtureSet set;
  add_benign_url(set, "par.example", 1000);
  const auto engine = make_verdict_engine(std::move(set));
  const auto v = engine.verify(raw("https://par.example/"));
  CHECK(v.elapsed_ms < 2000);
  CHECK(v.elapsed_ms >= 1000);
  CHECK(v.degraded.empty());
}

TEST_CASE("the global budget caps the fan-out") {
  FixtureSet set;
  add_benign_url(set, "budget.example", 900);
  ScoringConfig scoring = default_scoring_config();
  scoring.global_budget_ms = 300;
  const auto engine = make_verdict_engine(std::move(set), scoring);
  const auto v = engine.verify(raw("https://budget.example/"));
  CHECK(v.elapsed_ms < 300 + 200);
  CHECK(v.degraded.size() == 4);
}

TEST_CASE("all 81 provider outcome combinations yield a valid verdict") {
  constexpr int kDeadline = 20;
  FixtureSet set;
  std::vector<std::array<CallStatus, 4>> plans;
  for (int i = 0; i < 81; ++i) {
    std::array<CallStatus, 4> plan{};
    int code = i;
    const std::string host = "combo" + std::to_string(i) + ".example";
    for (int p = 0; p < 4; ++p) {
      plan[p] = static_cast<CallStatus>(code % 3);
      code /= 3;
      switch (plan[p]) {
        case CallStatus::Ok: set.add(fixture(kUrlProviders[p], host, benign(kUrlProviders[p]))); break;
        case CallStatus::TimedOut:
          set.add(fixture(kUrlProviders[p], host, benign(kUrlProviders[p]), kDeadline * 5));
          break;
        case CallStatus::Failed: set.add(failing(kUrlProviders[p], host)); break;
      }
    }
    plans.push_back(plan);
  }
  ScoringConfig scoring = default_scoring_config();
  scoring.per_call_deadline_ms = kDeadline;
  const auto engine = make_verdict_engine(std::move(set), scoring);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 81; ++i) {
    CAPTURE(i);
    const auto v = engine.verify(raw("https://combo" + std::to_string(i) + ".example/"));
    std::vector<std::string> expected_degraded;
    for (Slot s : kAllSlots) {
      for (int p = 0; p < 4; ++p) {
        if (kUrlSlots[p] != s) continue;
        const auto want = plans[i][p] == CallStatus::Ok ? Availability::Fresh : Availability::Fallback;
        CHECK(v.features.availability_of(s) == want);
        if (want == Availability::Fallback) expected_degraded.emplace_back(to_string(s));
      }
    }
    CHECK(v.features.availability_of(Slot::Lex) == Availability::Fresh);
    CHECK(v.features.availability_of(Slot::Business) == Availability::Inapplicable);
    CHECK(v.degraded == expected_degraded);
    CHECK((v.score >= 0.0 && v.score <= 1.0));
    CHECK(v.label == classify(v.score, 0.25));
    CHECK_FALSE(v.explanation.empty());
    REQUIRE(v.providers.size() == 4);
    for (int p = 0; p < 4; ++p) CHECK(v.providers[p].status == plans[i][p]);
  }
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
}

TEST_CASE("community reports tip a borderline phone number") {
  FixtureSet set;
  set.add(fixture(ProviderKind::PhoneRegistry, "+242000000001", PhoneRecord{"Carrier", "CG", 4, 0}));
  auto make = [&](double weight) {
    VerdictEngine::Hooks hooks;
    hooks.report_weight = [weight](const NormalizedEntity&, Timestamp) { return weight; };
    return VerdictEngine(fixture_client(set), default_scoring_config(), {}, catalogs(), fixed_clock(reference_time()),
                         hooks);
  };
  const auto without = make(0.0).verify(raw("+242000000001"));
  CHECK(without.score == doctest::Approx(0.85 / 3 * 0.8));
  CHECK(without.label == Label::Legitimate);

  const auto with = make(1.0).verify(raw("+242000000001"));
  CHECK(with.score == doctest::Approx(0.85 / 3 * 0.8 + 0.85 / 3 * 0.2));
  CHECK(with.label == Label::Malicious);
  REQUIRE(with.dominant_features.size() == 2);
  CHECK(with.dominant_features[0].feature == Feature::AbuseIndex);
  CHECK(with.dominant_features[1].feature == Feature::UserReports);
  CHECK(with.features.availability_of(Slot::Whois) == Availability::Inapplicable);
}

TEST_CASE("report hook failures count as zero weight") {
  FixtureSet set;
  set.add(fixture(ProviderKind::PhoneRegistry, "+242000000001", PhoneRecord{"Carrier", "CG", 4, 0}));
  VerdictEngine::Hooks hooks;
  hooks.report_weight = [](const NormalizedEntity&, Timestamp) -> double { throw std::runtime_error("down"); };
  hooks.on_verdict = [](const Verdict&) { throw std::runtime_error("log down"); };
  const VerdictEngine engine(fixture_client(std::move(set)), default_scoring_config(), {}, catalogs(),
                             fixed_clock(reference_time()), hooks);
  const auto v = engine.verify(raw("+242000000001"));
  CHECK(v.features.rep.user_report_weight == 0.0);
}

TEST_CASE("explanations name a prefix of the dominant features") {
  FixtureSet set;
  set.add(fixture(ProviderKind::Whois, "phish.example", WhoisRecord{parse_date("2026-01-10"), {}}));
  set.add(fixture(ProviderKind::SslCheck, "phish.example", SslRecord{parse_date("2026-01-12"), false, {}}));
  set.add(fixture(ProviderKind::HostInfo, "phish.example", HostRecord{64496, "Risky", "XA"}));
  set.add(failing(ProviderKind::Reputation, "phish.example"));
  ScoringConfig scoring = default_scoring_config();
  scoring.risky_asns = {64496};
  const auto engine = make_verdict_engine(std::move(set), scoring);
  const auto v = engine.verify(raw("http://phish.example/secure-login?acct=1"));
  CHECK(v.label == Label::Malicious);
  CHECK(v.explanation_key == "verdict.malicious");
  CHECK(v.degraded == std::vector<std::string>{"rep"});
  REQUIRE(v.dominant_features.size() >= 3);

  const auto& cat = *catalogs();
  for (const char* locale : {"en", "fr"}) {
    CAPTURE(locale);
    const auto ex = explain(v, cat, locale);
    CHECK_FALSE(ex.locale_fallback);
    REQUIRE(ex.named.size() == kExplainedFeatures);
    for (std::size_t i = 0; i < ex.named.size(); ++i) {
      CHECK(ex.named[i] == v.dominant_features[i].feature);
      CHECK(ex.text.find(cat.text(locale, "feature." + std::string(to_string(ex.named[i])))) != std::string::npos);
    }
    CHECK(ex.text.find(cat.text(locale, "slot.rep")) != std::string::npos);
    CHECK(ex.text.find(std::to_string(display_score(v.score))) != std::string::npos);
  }
  CHECK(explain(v, cat, "en").text != explain(v, cat, "fr").text);
}

TEST_CASE("unknown locales fall back to the default catalog") {
  FixtureSet set;
  add_benign_url(set, "bank.example");
  const auto engine = make_verdict_engine(std::move(set));
  const auto v = engine.verify(raw("https://bank.example/"), std::nullopt, "de");
  CHECK(v.locale == "en");
  CHECK(v.locale_fallback);
  CHECK(v.label == Label::Legitimate);
  CHECK(v.explanation_key == "verdict.legitimate");
}

TEST_CASE("email mailbox signals fold into the abuse index") {
  FixtureSet set;
  set.add(fixture(ProviderKind::MxLookup, "nomx.example", MxRecord{false}));
  const auto engine = VerdictEngine(
      IntelClient(std::make_shared<FixtureBackend>(std::move(set), std::unordered_set<std::string>{"mailinator.com"})),
      default_scoring_config(), {}, catalogs(), fixed_clock(reference_time()));
  const auto disposable = engine.verify(raw("x@mailinator.com"));
  CHECK(disposable.features.rep.abuse_index == 1.0);
  const auto no_mx = engine.verify(raw("x@nomx.example"));
  CHECK(no_mx.features.rep.abuse_index == doctest::Approx(0.6));
}

TEST_CASE("business names are compared against known fraudulent names") {
  CHECK(name_similarity({"acme", "trading"}, {"acme", "trading"}) == 1.0);
  CHECK(name_similarity({"acme", "trading"}, {"acme", "bank"}) == doctest::Approx(1.0 / 3));
  CHECK(name_similarity({}, {}) == 0.0);

  FixtureSet set;
  set.add(fixture(ProviderKind::BusinessRegistry, "mtn mobile money",
                  BusinessRecord{false, "CI", {"M.T.N. Mobile-Money SARL"}, std::nullopt}));
  const auto engine = make_verdict_engine(std::move(set));
  const auto v = engine.verify(raw("MTN Mobile Money Ltd"), EntityKind::Business);
  REQUIRE(v.features.business);
  CHECK(v.features.business->name_similarity == 1.0);
  CHECK(v.features.business->registration_signal == 0.0);
  CHECK(v.label == Label::Malicious);
}

TEST_CASE("entity errors propagate out of verify") {
  const auto engine = make_verdict_engine(FixtureSet{});
  try {
    engine.verify(raw("not a url"), EntityKind::Url);
    FAIL("expected MalformedUrl");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedUrl);
  }
}

TEST_CASE("display score rounds to 0-100") {
  CHECK(display_score(0.0) == 0);
  CHECK(display_score(0.2833) == 28);
  CHECK(display_score(0.455) == 46);
  CHECK(display_score(1.7) == 100);
}
