#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "guardsec/catalog.hpp"
#include "guardsec/entity.hpp"
#include "guardsec/features.hpp"
#include "guardsec/intel.hpp"
#include "guardsec/scoring.hpp"
#include "guardsec/time.hpp"

namespace guardsec {

struct ProviderTrace {
  ProviderKind provider = ProviderKind::Whois;
  std::string key;
  CallStatus status = CallStatus::Failed;
  std::int64_t elapsed_ms = 0;
};

struct Verdict {
  NormalizedEntity entity;
  FeatureVector features;
  double score = 0.0;
  double threshold = 0.25;
  Label label = Label::Legitimate;
  std::vector<DominantFeature> dominant_features;
  std::vector<Contribution> contributions;
  std::string explanation_key;
  std::string explanation;
  std::string locale;
  bool locale_fallback = false;
  std::vector<std::string> degraded;  // slot names that fell back, in slot order
  std::vector<ProviderTrace> providers;
  std::int64_t elapsed_ms = 0;
  Timestamp evaluated_at{};
};

inline constexpr std::size_t kExplainedFeatures = 3;

struct Explanation {
  std::string key;
  std::string text;
  std::vector<Feature> named;  // features the text mentions, always a prefix of dominant_features
  std::string locale;
  bool locale_fallback = false;
};

// Builds the plain-language explanation from the verdict's label, dominant
// features and degraded slots. An unknown locale falls back to the catalog
// default and sets locale_fallback instead of failing.
Explanation explain(const Verdict& verdict, const Catalogs& catalogs, std::string_view locale,
                    std::size_t k = kExplainedFeatures);

// Rendered 0-100 display score.
int display_score(double score);

// Token-set Jaccard similarity; 1 for identical token sets.
double name_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b);

class VerdictEngine {
 public:
  struct Hooks {
    // Decayed community report weight for the entity at `as_of`.
    std::function<double(const NormalizedEntity&, Timestamp)> report_weight;
    // Called with every finished verdict; exceptions are swallowed.
    std::function<void(const Verdict&)> on_verdict;
  };

  VerdictEngine(IntelClient intel, ScoringConfig scoring, NormalizeOptions normalize,
                std::shared_ptr<const Catalogs> catalogs, Clock clock, Hooks hooks = {});

  // Never fails on provider trouble; entity parse errors propagate.
  Verdict verify(const RawEntity& raw, std::optional<EntityKind> kind = std::nullopt,
                 std::string_view locale = "en") const;

  // Normalizes with the engine's options.
  NormalizedEntity normalize_input(const RawEntity& raw, std::optional<EntityKind> kind) const;

  const ScoringConfig& scoring() const { return scoring_; }
  const Catalogs& catalogs() const { return *catalogs_; }
  const IntelClient& intel() const { return intel_; }
  Timestamp now() const { return clock_(); }

 private:
  IntelClient intel_;
  ScoringConfig scoring_;
  NormalizeOptions normalize_;
  std::shared_ptr<const Catalogs> catalogs_;
  Clock clock_;
  Hooks hooks_;
};

// Providers queried for each kind, in launch order.
std::vector<ProviderKind> providers_for(EntityKind kind);

}  // namespace guardsec
