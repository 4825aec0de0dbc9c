#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "guardsec/features.hpp"
#include "json.hpp"

namespace guardsec {

struct CostModel {
  double c_fp = 1.0;
  double c_fn = 3.0;
};

// c_fp / (c_fp + c_fn). Throws Error{NonPositiveCost}.
double optimal_threshold(const CostModel& cost);

using WeightTable = std::map<Feature, double>;

struct ScoringConfig {
  std::map<EntityKind, WeightTable> weights;
  double threshold = 0.25;
  double fallback_penalty = 0.15;
  int global_budget_ms = 4500;
  int per_call_deadline_ms = 1500;

  // Inputs to the asn_isp and country transforms.
  std::set<std::int64_t> risky_asns;
  std::set<std::string> risky_countries;

  // Email verdicts fold mailbox signals into the abuse index.
  double email_disposable_abuse = 1.0;
  double email_no_mx_abuse = 0.6;
  // Phone registry complaint count at which the abuse index saturates.
  int phone_reports_saturation = 5;
};

// Required features share 85% of the mass equally, Optional ones 15%; a kind
// with no Optional feature gives all of it to the Required ones.
WeightTable default_weights(EntityKind kind);
ScoringConfig default_scoring_config();

// Throws Error{SchemaViolation} (including weight tables that do not sum to 1).
ScoringConfig scoring_config_from_json(const nlohmann::json& j);
ScoringConfig load_scoring_config(const std::string& path);
nlohmann::json scoring_config_to_json(const ScoringConfig& config);
void validate(const ScoringConfig& config);

// Maps the raw feature to [0,1]. Only meaningful for a Fresh slot.
double risk_transform(Feature feature, const FeatureVector& fv, const ScoringConfig& config);

struct Contribution {
  Feature feature = Feature::Length;
  double weight = 0.0;
  double transform = 0.0;     // 0 for fallback and inapplicable features
  double contribution = 0.0;  // weight * transform, or weight * fallback_penalty
  bool fallback = false;
};

struct ScoreBreakdown {
  double score = 0.0;  // clamped to [0,1]
  std::vector<Contribution> contributions;
};

// Throws Error{MissingWeightTable}.
ScoreBreakdown score_breakdown(const FeatureVector& features, const ScoringConfig& config);
double score(const FeatureVector& features, const ScoringConfig& config);

enum class Label { Legitimate, Malicious };
std::string_view to_string(Label label) noexcept;

Label classify(double score_value, const ScoringConfig& config);
Label classify(double score_value, double threshold);

struct DominantFeature {
  Feature feature = Feature::Length;
  double contribution = 0.0;
  friend bool operator==(const DominantFeature&, const DominantFeature&) = default;
};

// Positive transform contributions, largest first, ties by feature name.
// Fallback penalties are not evidence about the entity and are left out.
std::vector<DominantFeature> dominant_features(const ScoreBreakdown& breakdown);

}  // namespace guardsec
