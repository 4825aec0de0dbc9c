#include "guardsec/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "guardsec/error.hpp"
#include "guardsec/json_util.hpp"

namespace guardsec {

using nlohmann::json;

namespace {

constexpr double kRequiredMass = 0.85;
constexpr double kWeightSumTolerance = 1e-9;

double clamp01(double v) {
  return std::clamp(v, 0.0, 1.0);
}

std::string kind_key(EntityKind kind) {
  return std::string(to_string(kind));
}

}  // namespace

double optimal_threshold(const CostModel& cost) {
  if (!(cost.c_fp > 0.0) || !(cost.c_fn > 0.0) || !std::isfinite(cost.c_fp) || !std::isfinite(cost.c_fn)) {
    throw Error(ErrorCode::NonPositiveCost, "misclassification costs must be positive and finite");
  }
  return cost.c_fp / (cost.c_fp + cost.c_fn);
}

WeightTable default_weights(EntityKind kind) {
  const ApplicabilityMask mask = applicability_mask(kind);
  std::vector<Feature> required, optional;
  for (Feature f : kAllFeatures) {
    if (mask[f] == Applicability::Required) required.push_back(f);
    if (mask[f] == Applicability::Optional) optional.push_back(f);
  }
  const double req_mass = optional.empty() ? 1.0 : kRequiredMass;
  WeightTable table;
  for (Feature f : required) table[f] = req_mass / static_cast<double>(required.size());
  for (Feature f : optional) table[f] = (1.0 - kRequiredMass) / static_cast<double>(optional.size());
  return table;
}

ScoringConfig default_scoring_config() {
  ScoringConfig c;
  for (EntityKind k : kAllEntityKinds) c.weights[k] = default_weights(k);
  c.threshold = optimal_threshold(CostModel{});
  return c;
}

void validate(const ScoringConfig& c) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::SchemaViolation, "scoring config: " + what); };
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) bad("threshold must lie in (0,1)");
  if (!(c.fallback_penalty >= 0.0) || !std::isfinite(c.fallback_penalty)) bad("fallback_penalty must be >= 0");
  if (c.global_budget_ms <= 0) bad("global_budget_ms must be positive");
  if (c.per_call_deadline_ms <= 0) bad("per_call_deadline_ms must be positive");
  if (c.phone_reports_saturation <= 0) bad("phone_reports_saturation must be positive");
  for (double v : {c.email_disposable_abuse, c.email_no_mx_abuse}) {
    if (!(v >= 0.0 && v <= 1.0)) bad("email abuse signals must lie in [0,1]");
  }
  for (const auto& [kind, table] : c.weights) {
    double sum = 0.0;
    for (const auto& [feature, w] : table) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        bad("weight " + kind_key(kind) + "." + std::string(to_string(feature)) + " must be >= 0");
      }
      sum += w;
    }
    if (std::fabs(sum - 1.0) > kWeightSumTolerance) {
      bad("weights for " + kind_key(kind) + " sum to " + std::to_string(sum) + ", expected 1");
    }
  }
}

ScoringConfig scoring_config_from_json(const json& j) {
  ObjectReader r(j, "scoring config");
  ScoringConfig c;
  const auto threshold = r.optional<double>("threshold");
  const auto cost = r.optional<json>("cost_model");
  if (threshold && cost) r.fail("give either 'threshold' or 'cost_model', not both");
  if (cost) {
    ObjectReader cr(*cost, "scoring config cost_model");
    CostModel m;
    m.c_fp = cr.required<double>("c_fp");
    m.c_fn = cr.required<double>("c_fn");
    cr.finish();
    try {
      c.threshold = optimal_threshold(m);
    } catch (const Error& e) {
      r.fail(e.what());
    }
  } else if (threshold) {
    c.threshold = *threshold;
  } else {
    c.threshold = optimal_threshold(CostModel{});
  }
  c.fallback_penalty = r.value_or<double>("fallback_penalty", c.fallback_penalty);
  c.global_budget_ms = r.value_or<int>("global_budget_ms", c.global_budget_ms);
  c.per_call_deadline_ms = r.value_or<int>("per_call_deadline_ms", c.per_call_deadline_ms);
  c.email_disposable_abuse = r.value_or<double>("email_disposable_abuse", c.email_disposable_abuse);
  c.email_no_mx_abuse = r.value_or<double>("email_no_mx_abuse", c.email_no_mx_abuse);
  c.phone_reports_saturation = r.value_or<int>("phone_reports_saturation", c.phone_reports_saturation);
  if (const auto asns = r.optional<json>("risky_asns")) {
    if (!asns->is_array()) r.fail("risky_asns must be an array");
    for (const auto& a : *asns) {
      if (!a.is_number_integer()) r.fail("risky_asns must hold integers");
      c.risky_asns.insert(a.get<std::int64_t>());
    }
  }
  for (const auto& cc : r.value_or<std::vector<std::string>>("risky_countries", {})) c.risky_countries.insert(cc);

  if (const auto weights = r.optional<json>("weights")) {
    ObjectReader wr(*weights, "scoring config weights");
    for (EntityKind k : kAllEntityKinds) {
      const auto table = wr.optional<json>(kind_key(k).c_str());
      if (!table) continue;
      ObjectReader tr(*table, "scoring config weights." + kind_key(k));
      WeightTable t;
      for (Feature f : kAllFeatures) {
        if (auto w = tr.optional<double>(std::string(to_string(f)).c_str())) t[f] = *w;
      }
      tr.finish();
      c.weights[k] = std::move(t);
    }
    wr.finish();
  } else {
    for (EntityKind k : kAllEntityKinds) c.weights[k] = default_weights(k);
  }
  r.finish();
  validate(c);
  return c;
}

ScoringConfig load_scoring_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open scoring config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return scoring_config_from_json(j);
}

json scoring_config_to_json(const ScoringConfig& c) {
  json j;
  j["threshold"] = c.threshold;
  j["fallback_penalty"] = c.fallback_penalty;
  j["global_budget_ms"] = c.global_budget_ms;
  j["per_call_deadline_ms"] = c.per_call_deadline_ms;
  j["risky_asns"] = c.risky_asns;
  j["risky_countries"] = c.risky_countries;
  j["email_disposable_abuse"] = c.email_disposable_abuse;
  j["email_no_mx_abuse"] = c.email_no_mx_abuse;
  j["phone_reports_saturation"] = c.phone_reports_saturation;
  json w = json::object();
  for (const auto& [kind, table] : c.weights) {
    json t = json::object();
    for (const auto& [f, v] : table) t[std::string(to_string(f))] = v;
    w[kind_key(kind)] = t;
  }
  j["weights"] = w;
  return j;
}

double risk_transform(Feature feature, const FeatureVector& fv, const ScoringConfig& c) {
  const LexicalFeatures lex = fv.lex.value_or(LexicalFeatures{});
  switch (feature) {
    case Feature::Length: return clamp01((static_cast<double>(lex.length) - 54.0) / 46.0);
    case Feature::Entropy: return clamp01(lex.entropy_bits / 5.0);
    case Feature::SpecialChars: return clamp01(static_cast<double>(lex.special_char_count) / 8.0);
    case Feature::IpLiteral: return lex.has_ip_literal ? 1.0 : 0.0;
    case Feature::DomainAge: {
      if (!fv.whois || !fv.whois->domain_age_days) return 0.0;
      return clamp01(1.0 - static_cast<double>(*fv.whois->domain_age_days) / 365.0);
    }
    case Feature::AsnIsp:
      return fv.host && fv.host->asn && c.risky_asns.count(*fv.host->asn) ? 1.0 : 0.0;
    case Feature::Country:
      return fv.host && fv.host->country && c.risky_countries.count(*fv.host->country) ? 1.0 : 0.0;
    case Feature::CertAge: {
      if (!fv.ssl || !fv.ssl->cert_age_days) return 0.0;
      return clamp01(1.0 - static_cast<double>(*fv.ssl->cert_age_days) / 30.0);
    }
    case Feature::TrustedCa: return fv.ssl && fv.ssl->trusted_ca && !*fv.ssl->trusted_ca ? 1.0 : 0.0;
    case Feature::NameMatch: return fv.business ? clamp01(fv.business->name_similarity) : 0.0;
    case Feature::RegSignal: return fv.business ? clamp01(1.0 - fv.business->registration_signal) : 0.0;
    case Feature::Dnsbl: return clamp01(static_cast<double>(fv.rep.dnsbl_hits) / 3.0);
    case Feature::AbuseIndex: return clamp01(fv.rep.abuse_index);
    case Feature::UserReports: return clamp01(fv.rep.user_report_weight / 5.0);
  }
  return 0.0;
}

ScoreBreakdown score_breakdown(const FeatureVector& fv, const ScoringConfig& c) {
  const auto it = c.weights.find(fv.kind);
  if (it == c.weights.end()) {
    throw Error(ErrorCode::MissingWeightTable, "no weight table for kind '" + kind_key(fv.kind) + "'");
  }
  ScoreBreakdown out;
  double sum = 0.0;
  for (const auto& [feature, weight] : it->second) {
    Contribution ct;
    ct.feature = feature;
    ct.weight = weight;
    const Slot slot = slot_of(feature);
    const Availability avail = fv.availability_of(slot);
    // Community reports are held locally, so they stay scoreable when the
    // remote reputation feed falls back.
    const bool local = feature == Feature::UserReports;
    if (avail == Availability::Inapplicable) {
      // contributes nothing
    } else if (avail == Availability::Fallback && !local) {
      ct.fallback = true;
      ct.contribution = weight * c.fallback_penalty;
    } else {
      ct.transform = risk_transform(feature, fv, c);
      ct.contribution = weight * ct.transform;
    }
    sum += ct.contribution;
    out.contributions.push_back(ct);
  }
  out.score = clamp01(sum);
  return out;
}

double score(const FeatureVector& features, const ScoringConfig& config) {
  return score_breakdown(features, config).score;
}

std::string_view to_string(Label label) noexcept {
  return label == Label::Malicious ? "malicious" : "legitimate";
}

Label classify(double score_value, double threshold) {
  return score_value >= threshold ? Label::Malicious : Label::Legitimate;
}

Label classify(double score_value, const ScoringConfig& config) {
  return classify(score_value, config.threshold);
}

std::vector<DominantFeature> dominant_features(const ScoreBreakdown& breakdown) {
  std::vector<DominantFeature> out;
  for (const auto& c : breakdown.contributions) {
    if (!c.fallback && c.contribution > 0.0) out.push_back({c.feature, c.contribution});
  }
  std::sort(out.begin(), out.end(), [](const DominantFeature& a, const DominantFeature& b) {
    if (a.contribution != b.contribution) return a.contribution > b.contribution;
    return to_string(a.feature) < to_string(b.feature);
  });
  return out;
}

}  // namespace guardsec
