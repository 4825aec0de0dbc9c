#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "guardsec/entity.hpp"
#include "json.hpp"

namespace guardsec {

struct LabeledExample {
  std::string entity;
  EntityKind kind = EntityKind::Url;
  bool label = false;  // true = malicious
  double score = 0.0;
  std::optional<bool> label_b;  // second annotator, for agreement
};

struct MetricsReport {
  std::int64_t n = 0;
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> auc;
  std::optional<double> kappa;
};

// Predicted malicious iff score >= threshold. Throws Error{EmptyInput}.
MetricsReport confusion_metrics(const std::vector<LabeledExample>& examples, double threshold);

// 2PR/(P+R); nullopt when P+R == 0.
std::optional<double> f1_score(double precision, double recall);

// Mann-Whitney AUC with ties counted one half. Throws Error{SingleClassInput}.
double auc(const std::vector<LabeledExample>& examples);

// Throws Error{LengthMismatch} for unequal or empty inputs, Error{DegenerateMarginals} when p_e = 1.
double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b);

struct PercentileReport {
  double p50 = 0.0, p90 = 0.0, p99 = 0.0;
};

// Nearest rank: the value at 1-based index ceil(per_mille * n / 1000) of the
// ascending sort. Throws Error{EmptyInput}.
double percentile(std::vector<double> samples, int per_mille);
PercentileReport percentiles(const std::vector<double>& samples);

struct EvalReport {
  double threshold = 0.25;
  MetricsReport overall;
  // One entry per kind; nullopt for kinds absent from the corpus.
  std::map<EntityKind, std::optional<MetricsReport>> per_kind;
};

// Label lines: {"entity", "kind", "label", optional "label_b"}. Score lines: {"entity", "score"}.
// Throws Error{ParseError | SchemaViolation}.
std::vector<LabeledExample> read_labels(const std::string& path);
std::map<std::string, double> read_scores(const std::string& path);

// Joins scores onto labels by entity. Throws Error{JoinMismatch} when either
// side has an entity the other lacks, or an entity repeats.
std::vector<LabeledExample> join_scores(std::vector<LabeledExample> labels, const std::map<std::string, double>& scores);

EvalReport evaluate(const std::vector<LabeledExample>& examples, double threshold);
EvalReport run_eval(const std::string& labels_path, const std::string& scores_path, double threshold);
// Scores every labeled entity through `scorer` (typically a live engine).
EvalReport run_eval_live(const std::string& labels_path,
                         const std::function<double(const std::string&, EntityKind)>& scorer, double threshold);

nlohmann::json metrics_to_json(const MetricsReport& m);
nlohmann::json eval_report_to_json(const EvalReport& r);

}  // namespace guardsec
