#include "guardsec/verdict.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "guardsec/error.hpp"

namespace guardsec {

namespace {

using SteadyClock = std::chrono::steady_clock;

struct Outcomes {
  std::map<ProviderKind, ProviderOutcome> by_provider;

  const ProviderOutcome* get(ProviderKind k) const {
    const auto it = by_provider.find(k);
    return it == by_provider.end() ? nullptr : &it->second;
  }
  std::optional<CallStatus> status(ProviderKind k) const {
    const auto* o = get(k);
    return o ? std::optional(o->status) : std::nullopt;
  }
  template <class T>
  const T* payload(ProviderKind k) const {
    const auto* o = get(k);
    if (!o || o->status != CallStatus::Ok || !o->payload) return nullptr;
    return std::get_if<T>(&*o->payload);
  }
};

long age_days(Date from, Timestamp now) {
  return std::max(0L, days_between(from, std::chrono::floor<std::chrono::days>(now)));
}

std::vector<std::string> normalized_tokens(const std::string& name, const NormalizeOptions& opts) {
  try {
    const auto e = normalize(EntityKind::Business, RawEntity{name, {}}, opts);
    return e.business_tokens.value_or(std::vector<std::string>{});
  } catch (const Error&) {
    return {};
  }
}

std::string kind_phrase_key(EntityKind kind) {
  return "kind." + std::string(to_string(kind));
}

}  // namespace

int display_score(double score) {
  return static_cast<int>(std::lround(std::clamp(score, 0.0, 1.0) * 100.0));
}

double name_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

std::vector<ProviderKind> providers_for(EntityKind kind) {
  switch (kind) {
    case EntityKind::Url:
    case EntityKind::Domain:
      return {ProviderKind::Whois, ProviderKind::SslCheck, ProviderKind::HostInfo, ProviderKind::Reputation};
    case EntityKind::Email:
      return {ProviderKind::Whois, ProviderKind::HostInfo, ProviderKind::Reputation, ProviderKind::MxLookup,
              ProviderKind::DisposableDomain};
    case EntityKind::Phone: return {ProviderKind::PhoneRegistry};
    case EntityKind::Business:
      return {ProviderKind::BusinessRegistry, ProviderKind::Reputation, ProviderKind::Whois, ProviderKind::SslCheck,
              ProviderKind::HostInfo};
  }
  return {};
}

Explanation explain(const Verdict& v, const Catalogs& catalogs, std::string_view locale, std::size_t k) {
  Explanation ex;
  try {
    ex.locale = catalogs.resolve(locale);
  } catch (const Error&) {
    ex.locale = catalogs.default_locale();
    ex.locale_fallback = true;
  }
  ex.key = v.label == Label::Malicious ? "verdict.malicious" : "verdict.legitimate";
  const std::map<std::string, std::string> args{
      {"kind", catalogs.text(ex.locale, kind_phrase_key(v.entity.kind))},
      {"score", std::to_string(display_score(v.score))},
  };
  std::string text = catalogs.text(ex.locale, ex.key, args);
  for (std::size_t i = 0; i < v.dominant_features.size() && i < k; ++i) {
    const Feature f = v.dominant_features[i].feature;
    text += " " + catalogs.text(ex.locale, "feature." + std::string(to_string(f)));
    ex.named.push_back(f);
  }
  if (!v.degraded.empty()) {
    std::string slots;
    for (const auto& s : v.degraded) {
      if (!slots.empty()) slots += ", ";
      slots += catalogs.text(ex.locale, "slot." + s);
    }
    text += " " + catalogs.text(ex.locale, "explain.partial", {{"slots", slots}});
  }
  ex.text = std::move(text);
  return ex;
}

VerdictEngine::VerdictEngine(IntelClient intel, ScoringConfig scoring, NormalizeOptions normalize,
                             std::shared_ptr<const Catalogs> catalogs, Clock clock, Hooks hooks)
    : intel_(std::move(intel)),
      scoring_(std::move(scoring)),
      normalize_(std::move(normalize)),
      catalogs_(std::move(catalogs)),
      clock_(std::move(clock)),
      hooks_(std::move(hooks)) {
  validate(scoring_);
  if (!catalogs_) throw Error(ErrorCode::InvalidArgument, "catalogs are required");
  if (!clock_) clock_ = system_clock();
}

NormalizedEntity VerdictEngine::normalize_input(const RawEntity& raw, std::optional<EntityKind> kind) const {
  return normalize(kind.value_or(detect_kind(raw)), raw, normalize_);
}

Verdict VerdictEngine::verify(const RawEntity& raw, std::optional<EntityKind> kind, std::string_view locale) const {
  const auto t0 = SteadyClock::now();
  Verdict v;
  v.entity = normalize_input(raw, kind);
  v.evaluated_at = clock_();
  const EntityKind k = v.entity.kind;

  // Fan out every lookup at once, then join at the global budget.
  struct Launched {
    ProviderKind provider;
    std::string key;
    PendingCall call;
  };
  std::vector<Launched> launched;
  for (ProviderKind p : providers_for(k)) {
    std::string key = lookup_key(p, v.entity);
    PendingCall call = intel_.start(p, key, scoring_.per_call_deadline_ms);
    launched.push_back({p, std::move(key), std::move(call)});
  }
  const LexicalFeatures lex = extract_lexical(v.entity);
  const auto join = t0 + std::chrono::milliseconds(scoring_.global_budget_ms);
  Outcomes out;
  for (auto& l : launched) {
    ProviderOutcome o = l.call.wait_until(join);
    v.providers.push_back({l.provider, l.key, o.status, o.elapsed_ms});
    out.by_provider[l.provider] = std::move(o);
  }

  const Timestamp now = v.evaluated_at;
  std::optional<HostFeatures> host;
  std::optional<WhoisFeatures> whois;
  std::optional<SslFeatures> ssl;
  std::optional<BusinessFeatures> business;
  ReputationFeatures rep;
  SlotOutcomes slots;

  if (const auto* w = out.payload<WhoisRecord>(ProviderKind::Whois)) {
    whois = WhoisFeatures{age_days(w->registered_on, now), w->registrar};
  }
  if (const auto* s = out.payload<SslRecord>(ProviderKind::SslCheck)) {
    ssl = SslFeatures{age_days(s->not_before, now), s->trusted_chain};
  }
  if (const auto* h = out.payload<HostRecord>(ProviderKind::HostInfo)) {
    host = HostFeatures{h->asn, h->isp, h->country};
  }
  if (const auto* r = out.payload<ReputationRecord>(ProviderKind::Reputation)) {
    rep.dnsbl_hits = r->dnsbl_hits;
    rep.abuse_index = r->abuse_index;
  }
  slots.whois = out.status(ProviderKind::Whois);
  slots.ssl = out.status(ProviderKind::SslCheck);
  slots.host = out.status(ProviderKind::HostInfo);
  slots.rep = out.status(ProviderKind::Reputation);

  if (k == EntityKind::Email) {
    double signal = 0.0;
    if (const auto* d = out.payload<DisposableRecord>(ProviderKind::DisposableDomain); d && d->disposable) {
      signal = std::max(signal, scoring_.email_disposable_abuse);
    }
    if (const auto* m = out.payload<MxRecord>(ProviderKind::MxLookup); m && !m->has_mx) {
      signal = std::max(signal, scoring_.email_no_mx_abuse);
    }
    rep.abuse_index = std::max(rep.abuse_index, signal);
    // A mailbox finding is reputation evidence even when the feed is down.
    if (signal > 0.0 && slots.rep != CallStatus::Ok) {
      slots.rep = CallStatus::Ok;
      rep.dnsbl_hits = 0;
    }
  } else if (k == EntityKind::Phone) {
    // The phone registry feeds both the carrier/country slot and the reputation slot.
    slots.host = slots.rep = out.status(ProviderKind::PhoneRegistry);
    if (const auto* p = out.payload<PhoneRecord>(ProviderKind::PhoneRegistry)) {
      host = HostFeatures{std::nullopt, p->carrier, p->country};
      rep.dnsbl_hits = p->feed_hits;
      rep.abuse_index = std::min(1.0, static_cast<double>(p->fraud_reports) / scoring_.phone_reports_saturation);
    }
  } else if (k == EntityKind::Business) {
    slots.business = out.status(ProviderKind::BusinessRegistry);
    if (const auto* b = out.payload<BusinessRecord>(ProviderKind::BusinessRegistry)) {
      BusinessFeatures bf;
      const auto mine = v.entity.business_tokens.value_or(std::vector<std::string>{});
      for (const auto& name : b->known_fraud_names) {
        bf.name_similarity = std::max(bf.name_similarity, name_similarity(mine, normalized_tokens(name, normalize_)));
      }
      bf.registration_signal = b->registered ? 1.0 : 0.0;
      bf.web_signal = b->website ? 1.0 : 0.0;
      business = bf;
    }
  }

  if (hooks_.report_weight) {
    try {
      rep.user_report_weight = hooks_.report_weight(v.entity, now);
    } catch (const std::exception&) {
      rep.user_report_weight = 0.0;
    }
  }

  v.features = assemble_features(k, lex, host, whois, ssl, rep, business, slots);
  const ScoreBreakdown breakdown = score_breakdown(v.features, scoring_);
  v.score = breakdown.score;
  v.threshold = scoring_.threshold;
  v.label = classify(v.score, scoring_);
  v.contributions = breakdown.contributions;
  v.dominant_features = dominant_features(breakdown);
  for (Slot s : kAllSlots) {
    if (v.features.availability_of(s) == Availability::Fallback) v.degraded.emplace_back(to_string(s));
  }

  Explanation ex = explain(v, *catalogs_, locale);
  v.explanation_key = ex.key;
  v.explanation = std::move(ex.text);
  v.locale = ex.locale;
  v.locale_fallback = ex.locale_fallback;

  v.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(SteadyClock::now() - t0).count();
  if (hooks_.on_verdict) {
    try {
      hooks_.on_verdict(v);
    } catch (...) {
      // Logging never fails the verdict path.
    }
  }
  return v;
}

}  // namespace guardsec
