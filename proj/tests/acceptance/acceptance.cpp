// One PASS/FAIL line per acceptance criterion; exits 1 if any fail.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "guardsec/assistant.hpp"
#include "guardsec/empreinte.hpp"
#include "guardsec/eval.hpp"
#include "guardsec/features.hpp"
#include "guardsec/privacy.hpp"
#include "guardsec/render.hpp"
#include "guardsec/scoring.hpp"
#include "guardsec/service.hpp"
#include "guardsec/verdict.hpp"
#include "guardsec/visitor_log.hpp"
#include "test_support.hpp"

using namespace guardsec;
using namespace guardsec::testing;
using nlohmann::json;
using Steady = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
constexpr double kF1Tolerance = 0.0005;
constexpr double kF1RuntimeS = 1.0;
constexpr int kInvarianceScores = 1000;
constexpr int kInvarianceScales = 10;
constexpr std::int64_t kSlowCallMinMs = 1500;
constexpr std::int64_t kSlowCallMaxMs = 1700;
constexpr std::int64_t kParallelMaxMs = 2000;
constexpr double kDeadlineRuntimeS = 10.0;
constexpr double kCombinationsRuntimeS = 5.0;
constexpr double kEntropyTolerance = 1e-9;
constexpr int kEntropyStrings = 1000;
constexpr int kAucSets = 200;
constexpr int kAucMaxExamples = 200;
constexpr int kPercentileLists = 500;
constexpr double kLeakRateTolerance = 0.002;
constexpr double kRateExactTolerance = 1e-12;
constexpr std::int64_t kChatFallbackMs = 3000;
constexpr std::int64_t kChatFallbackSlackMs = 100;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void expect(bool cond, const std::string& what) {
    if (!cond && out_.pass) out_.detail = what;
    out_.pass = out_.pass && cond;
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome result() const { return out_; }

 private:
  Outcome out_;
};

double seconds_since(Steady::time_point t0) {
  return std::chrono::duration<double>(Steady::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

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

Outcome published_f1_arithmetic() {
  struct Row {
    const char* name;
    double p, r, f1;
  };
  const Row rows[] = {{"url", 0.891, 0.923, 0.907},      {"email", 0.876, 0.901, 0.888},
                      {"phone", 0.843, 0.887, 0.864},    {"domain", 0.912, 0.934, 0.923},
                      {"business", 0.861, 0.879, 0.870}, {"overall", 0.877, 0.905, 0.890}};
  const auto t0 = Steady::now();
  Checker c;
  std::string off;
  for (const auto& row : rows) {
    const double f1 = *f1_score(row.p, row.r);
    const double delta = std::abs(f1 - row.f1);
    if (delta > kF1Tolerance) off += std::string(off.empty() ? "" : ", ") + row.name + " " + fmt("%.5f", f1) +
                                     " vs " + fmt("%.3f", row.f1) + " |d|=" + fmt("%.5f", delta);
  }
  c.expect(off.empty(), "rows outside tolerance: " + off);
  c.expect(seconds_since(t0) < kF1RuntimeS, "runtime");
  c.note("all six rows within " + fmt("%.4f", kF1Tolerance));
  return c.result();
}

Outcome threshold_derivation() {
  Checker c;
  c.expect(optimal_threshold(CostModel{1.0, 3.0}) == 0.25, "optimal_threshold(1,3) != 0.25");
  std::mt19937 rng(20260115);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  std::vector<double> scores(kInvarianceScores);
  for (double& s : scores) s = score(rng);
  const double base = optimal_threshold(CostModel{1.0, 3.0});
  int flips = 0;
  for (int k = 0; k < kInvarianceScales; ++k) {
    const double f = scale(rng);
    const double t = optimal_threshold(CostModel{f, 3.0 * f});
    for (double s : scores) flips += classify(s, t) != classify(s, base);
  }
  c.expect(flips == 0, std::to_string(flips) + " decisions changed under cost scaling");
  c.note("threshold 0.25, 10000 decisions invariant");
  return c.result();
}

Outcome deadline_contract() {
  const auto t0 = Steady::now();
  Checker c;
  {
    FixtureSet set;
    set.add(fixture(ProviderKind::Whois, "slow.example", benign(ProviderKind::Whois), 2000));
    for (ProviderKind p : {ProviderKind::SslCheck, ProviderKind::HostInfo, ProviderKind::Reputation}) {
      set.add(fixture(p, "slow.example", benign(p), 100));
    }
    const auto v = make_verdict_engine(std::move(set)).verify(raw("https://slow.example/"));
    c.expect(v.degraded == std::vector<std::string>{"whois"}, "degraded set is not exactly {whois}");
    c.expect(v.elapsed_ms >= kSlowCallMinMs && v.elapsed_ms <= kSlowCallMaxMs,
             "slow-provider elapsed " + std::to_string(v.elapsed_ms) + " ms");
    c.note("slow whois " + std::to_string(v.elapsed_ms) + " ms");
  }
  {
    FixtureSet set;
    add_benign_url(set, "par.example", 1000);
    const auto v = make_verdict_engine(std::move(set)).verify(raw("https://par.example/"));
    c.expect(v.elapsed_ms < kParallelMaxMs, "parallel elapsed " + std::to_string(v.elapsed_ms) + " ms");
    c.expect(v.degraded.empty(), "parallel run degraded");
    c.note(c.result().detail + ", 4x1000 ms in " + std::to_string(v.elapsed_ms) + " ms");
  }
  c.expect(seconds_since(t0) < kDeadlineRuntimeS, "runtime");
  return c.result();
}

Outcome degradation_totality() {
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
      if (plan[p] == CallStatus::Ok) set.add(fixture(kUrlProviders[p], host, benign(kUrlProviders[p])));
      if (plan[p] == CallStatus::TimedOut) set.add(fixture(kUrlProviders[p], host, benign(kUrlProviders[p]), kDeadline * 5));
      if (plan[p] == CallStatus::Failed) set.add(failing(kUrlProviders[p], host));
    }
    plans.push_back(plan);
  }
  ScoringConfig scoring = default_scoring_config();
  scoring.per_call_deadline_ms = kDeadline;
  const auto engine = make_verdict_engine(std::move(set), scoring);
  const auto t0 = Steady::now();
  Checker c;
  int bad = 0;
  for (int i = 0; i < 81; ++i) {
    try {
      const auto v = engine.verify(raw("https://combo" + std::to_string(i) + ".example/"));
      bool ok = v.score >= 0.0 && v.score <= 1.0 && v.label == classify(v.score, 0.25) && !v.explanation.empty() &&
                v.features.availability_of(Slot::Lex) == Availability::Fresh &&
                v.features.availability_of(Slot::Business) == Availability::Inapplicable;
      for (int p = 0; p < 4; ++p) {
        const auto want = plans[i][p] == CallStatus::Ok ? Availability::Fresh : Availability::Fallback;
        ok = ok && v.features.availability_of(kUrlSlots[p]) == want;
      }
      bad += !ok;
    } catch (const std::exception&) {
      ++bad;
    }
  }
  c.expect(bad == 0, std::to_string(bad) + " combinations wrong");
  c.expect(seconds_since(t0) < kCombinationsRuntimeS, "runtime");
  c.note("81/81 combinations, " + fmt("%.2f s", seconds_since(t0)));
  return c.result();
}

double entropy_oracle(const std::string& s) {
  std::map<char, int> counts;
  for (char ch : s) ++counts[ch];
  double h = 0.0;
  for (const auto& [_, n] : counts) {
    const double p = static_cast<double>(n) / static_cast<double>(s.size());
    h -= p * std::log2(p);
  }
  return h;
}

Outcome entropy_oracle_check() {
  std::mt19937 rng(5);
  double worst = 0.0;
  for (int i = 0; i < kEntropyStrings; ++i) {
    std::string s(1 + rng() % 120, ' ');
    const int alphabet = 1 + static_cast<int>(rng() % 94);
    for (char& ch : s) ch = static_cast<char>(33 + rng() % alphabet);
    worst = std::max(worst, std::abs(shannon_entropy(s) - entropy_oracle(s)));
  }
  Checker c;
  c.expect(worst < kEntropyTolerance, "max |d| " + fmt("%.3g", worst));
  c.note("max |d| " + fmt("%.3g", worst));
  return c.result();
}

Outcome auc_oracle_check() {
  std::mt19937 rng(11);
  int mismatches = 0;
  for (int round = 0; round < kAucSets; ++round) {
    const int n = 2 + static_cast<int>(rng() % (kAucMaxExamples - 1));
    const int levels = 1 + static_cast<int>(rng() % 25);
    std::vector<LabeledExample> set;
    for (int i = 0; i < n; ++i) {
      set.push_back(LabeledExample{"e", EntityKind::Url, rng() % 2 == 0, static_cast<double>(rng() % levels) / levels,
                                   std::nullopt});
    }
    set[0].label = true;
    set[1].label = false;
    std::int64_t twice = 0, pairs = 0;
    for (const auto& p : set) {
      for (const auto& q : set) {
        if (!p.label || q.label) continue;
        ++pairs;
        twice += p.score > q.score ? 2 : p.score == q.score ? 1 : 0;
      }
    }
    mismatches += auc(set) != static_cast<double>(twice) / static_cast<double>(2 * pairs);
  }
  Checker c;
  c.expect(mismatches == 0, std::to_string(mismatches) + " sets differ");
  c.note("200/200 sets exact");
  return c.result();
}

Outcome percentile_oracle_check() {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0.0, 4000.0);
  int mismatches = 0;
  for (int round = 0; round < kPercentileLists; ++round) {
    std::vector<double> v(1 + rng() % 500);
    for (double& x : v) x = rng() % 2 ? std::floor(u(rng)) : u(rng);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const std::int64_t n = static_cast<std::int64_t>(sorted.size());
    for (int pm : {500, 900, 990}) {
      std::int64_t k = 1;
      while (k * 1000 < pm * n) ++k;
      mismatches += percentile(v, pm) != sorted[static_cast<std::size_t>(k - 1)];
    }
  }
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  const auto p = percentiles(hundred);
  Checker c;
  c.expect(mismatches == 0, std::to_string(mismatches) + " percentiles differ");
  c.expect(p.p50 == 50 && p.p90 == 90 && p.p99 == 99, "[1..100] percentiles wrong");
  c.note("500 lists exact, [1..100] -> (50, 90, 99)");
  return c.result();
}

Outcome visitor_aggregates() {
  std::vector<VisitorRecord> log;
  for (int i = 0; i < 1000; ++i) {
    VisitorRecord v;
    v.ip_hash = salted_hash("acceptance", std::to_string(i));
    v.session_id = "s";
    v.recorded_at = reference_time() + std::chrono::seconds(i);
    v.vpn_flag = i < 234;
    v.dns_leak_flag = i < 74;
    v.hosting_flag = i >= 300 && i < 389;
    v.abuse_score = i >= 600 && i < 642 ? 0.3 : 0.0;
    log.push_back(v);
  }
  const auto s = aggregate_stats(log, reference_time(), reference_time() + std::chrono::hours(1));
  Checker c;
  c.expect(std::abs(s.vpn_rate - 0.234) < kRateExactTolerance, "vpn rate " + fmt("%.4f", s.vpn_rate));
  c.expect(s.dns_leak_rate_among_vpn && std::abs(*s.dns_leak_rate_among_vpn - 74.0 / 234.0) < kRateExactTolerance &&
               std::abs(*s.dns_leak_rate_among_vpn - 0.317) <= kLeakRateTolerance,
           "dns leak rate");
  c.expect(std::abs(s.datacenter_rate - 0.089) < kRateExactTolerance, "datacenter rate");
  c.expect(std::abs(s.abuse_nonzero_rate - 0.042) < kRateExactTolerance, "abuse rate");
  c.note("0.234, " + fmt("%.4f", s.dns_leak_rate_among_vpn.value_or(-1)) + ", 0.089, 0.042");
  return c.result();
}

Outcome audit_completeness() {
  FixtureSet set;
  for (int mask = 0; mask < 64; ++mask) {
    GeoRecord g{64500, "Atlantic Telecom", "CI", "Abidjan", "Lagunes", "Africa/Abidjan", 5.35, -4.0, "mobile"};
    if (mask & 1) g.country.reset();
    if (mask & 2) g.city.reset();
    if (mask & 4) g.region.reset();
    if (mask & 8) g.timezone.reset();
    if (mask & 16) g.lat.reset();
    if (mask & 32) g.lon.reset();
    const std::string ip = "203.0.113." + std::to_string(mask + 1);
    set.add(fixture(ProviderKind::GeoAsn, ip, g));
    set.add(fixture(ProviderKind::AnonymizationCheck, ip, AnonymizationRecord{}));
    set.add(fixture(ProviderKind::AbuseScore, ip, AbuseRecord{0.0}));
  }
  const Auditor auditor(fixture_client(std::move(set)));
  int errors = 0, incomplete = 0;
  for (int mask = 0; mask < 64; ++mask) {
    try {
      const auto r = auditor.audit(HeaderMap{{"remote-addr", "203.0.113." + std::to_string(mask + 1)}});
      incomplete += r.indicators.size() != kIndicatorCount;
      const auto j = audit_to_json(r, catalogs().get(), "en");
      incomplete += j["indicators"].size() != kIndicatorCount;
    } catch (const std::exception&) {
      ++errors;
    }
  }
  Checker c;
  c.expect(errors == 0, std::to_string(errors) + " errors");
  c.expect(incomplete == 0, std::to_string(incomplete) + " incomplete reports");
  c.note("64/64 combinations, 12 indicators each, 0 errors");
  return c.result();
}

Outcome assistant_gate_and_deadline() {
  static const char* const kOutOfScope[] = {
      "What's the weather like in Brazzaville tomorrow?", "Give me a recipe for poulet moambé",
      "Who won the Africa Cup of Nations in 2024?",       "Write a poem about the ocean",
      "How do I convert Celsius to Fahrenheit?",          "Recommend a good novel to read this weekend",
      "What is the capital of Burkina Faso?",             "Translate good morning into Lingala",
      "How many calories are in an avocado?",             "Tell me a joke about cats",
      "What time does the market open on Sunday?",        "Help me plan a trip to Dakar",
      "Solve 2x + 3 = 11",                                "Quelle est la météo à Abidjan ?",
      "Donne-moi une recette d'attiéké",                  "Qui a gagné le match hier soir ?",
      "Écris une chanson d'anniversaire pour ma sœur",    "Combien de temps pour cuire du riz ?",
      "Explique la photosynthèse",                        "Quel est le meilleur joueur de football africain ?",
  };
  const Lexicon lexicon = Lexicon::load(repo_data_dir() + "/assistant/lexicon.txt");
  Checker c;
  auto remote = std::make_shared<FixtureChatBackend>("remote reply");
  const Assistant gated(remote, catalogs(), lexicon);
  SessionContext ctx;
  for (const char* text : kOutOfScope) c.expect(!gated.chat(text, ctx).in_scope, std::string("in scope: ") + text);
  c.expect(remote->calls() == 0, "remote called " + std::to_string(remote->calls()) + " times");

  auto slow = std::make_shared<FixtureChatBackend>("late reply", 5000);
  const Assistant waiting(slow, catalogs(), lexicon);
  const auto t0 = Steady::now();
  const auto turn = waiting.chat("Is this link a phishing scam?", ctx);
  const auto took = std::chrono::duration_cast<std::chrono::milliseconds>(Steady::now() - t0).count();
  c.expect(turn.backend == ChatBackendKind::RuleBased, "slow remote answer was used");
  c.expect(std::abs(took - kChatFallbackMs) <= kChatFallbackSlackMs, "fallback after " + std::to_string(took) + " ms");
  c.note("20/20 gated, 0 remote calls, fallback after " + std::to_string(took) + " ms");
  return c.result();
}

Outcome kappa_examples() {
  Checker c;
  c.expect(cohen_kappa({true, true, false, false}, {true, false, false, false}) == 0.5, "[1,1,0,0] vs [1,0,0,0]");
  c.expect(cohen_kappa({true, false, true, false}, {true, false, true, false}) == 1.0, "identical vectors");
  c.expect(cohen_kappa({true, true, false, true, false}, {true, true, false, true, false}) == 1.0,
           "identical vectors");
  c.note("0.5 and 1.0 exactly");
  return c.result();
}

HttpRequest request_from_json(const json& j) {
  HttpRequest r;
  r.method = j.at("method").get<std::string>();
  r.path = j.at("path").get<std::string>();
  r.remote_addr = j.value("remote_addr", "");
  const json headers = j.value("headers", json::object());
  const json query = j.value("query", json::object());
  for (const auto& [k, v] : headers.items()) r.headers[k] = v.get<std::string>();
  for (const auto& [k, v] : query.items()) r.query[k] = v.get<std::string>();
  if (j.contains("body")) r.body = j["body"].dump();
  if (j.contains("raw_body")) r.body = j["raw_body"].get<std::string>();
  return r;
}

Outcome service_contract() {
  Checker c;
  int pairs = 0, mismatches = 0, forbidden = 0;
  for (const char* endpoint : {"verify", "empreinte", "report", "chat", "health"}) {
    std::ifstream in(std::string(GUARDSEC_SOURCE_DIR) + "/tests/golden/service/" + endpoint + ".json");
    c.expect(static_cast<bool>(in), std::string("missing golden file for ") + endpoint);
    if (!in) continue;
    const json cases = json::parse(in);
    Engine engine(test_engine_config());
    Service service(engine);
    for (const auto& g : cases) {
      const auto res = service.handle(request_from_json(g["request"]));
      json headers = json::object();
      for (const auto& [k, v] : res.headers) headers[k] = v;
      const json actual{{"status", res.status}, {"headers", headers}, {"body", strip_volatile_fields(res.body)}};
      ++pairs;
      mismatches += actual.dump() != g["response"].dump();
      forbidden += res.status == 401 || res.status == 403;
    }
  }
  Engine engine(test_engine_config());
  Service service(engine);
  for (const char* method : {"GET", "POST", "PUT", "DELETE", "OPTIONS"}) {
    for (const char* path : {"/api/verify", "/api/empreinte", "/api/report", "/api/chat", "/api/health", "/admin"}) {
      HttpRequest r;
      r.method = method;
      r.path = path;
      r.remote_addr = "198.51.100.10";
      r.body = "{}";
      const int s = service.handle(r).status;
      forbidden += s == 401 || s == 403;
    }
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(pairs) + " golden pairs differ");
  c.expect(forbidden == 0, std::to_string(forbidden) + " responses were 401/403");
  c.note(std::to_string(pairs) + " golden pairs identical, no 401/403");
  return c.result();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"published F1 arithmetic", published_f1_arithmetic},
      {"threshold derivation and cost-scaling invariance", threshold_derivation},
      {"per-call deadline and parallel fan-out", deadline_contract},
      {"graceful degradation over 81 outcome combinations", degradation_totality},
      {"entropy oracle", entropy_oracle_check},
      {"AUC oracle", auc_oracle_check},
      {"percentile oracle", percentile_oracle_check},
      {"visitor log aggregates", visitor_aggregates},
      {"audit completeness over 64 geo-null combinations", audit_completeness},
      {"assistant scope gate and remote deadline", assistant_gate_and_deadline},
      {"Cohen's kappa examples", kappa_examples},
      {"service golden replay and no 401/403", service_contract},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %s  (%s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
