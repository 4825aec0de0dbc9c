#include "guardsec/eval.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "guardsec/error.hpp"
#include "guardsec/json_util.hpp"

namespace guardsec {

using nlohmann::json;

namespace {

template <class Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
    fn(j, where);
  }
}

json opt(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::optional<double> f1_score(double p, double r) {
  if (p + r <= 0.0) return std::nullopt;
  return 2.0 * p * r / (p + r);
}

MetricsReport confusion_metrics(const std::vector<LabeledExample>& examples, double threshold) {
  if (examples.empty()) throw Error(ErrorCode::EmptyInput, "no examples");
  MetricsReport m;
  m.n = static_cast<std::int64_t>(examples.size());
  for (const auto& e : examples) {
    const bool predicted = e.score >= threshold;
    if (predicted && e.label) ++m.tp;
    if (predicted && !e.label) ++m.fp;
    if (!predicted && !e.label) ++m.tn;
    if (!predicted && e.label) ++m.fn;
  }
  if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  if (m.precision && m.recall) m.f1 = f1_score(*m.precision, *m.recall);
  return m;
}

double auc(const std::vector<LabeledExample>& examples) {
  std::vector<std::pair<double, bool>> s;
  s.reserve(examples.size());
  std::int64_t np = 0;
  for (const auto& e : examples) {
    s.emplace_back(e.score, e.label);
    np += e.label ? 1 : 0;
  }
  const std::int64_t nn = static_cast<std::int64_t>(s.size()) - np;
  if (np == 0 || nn == 0) throw Error(ErrorCode::SingleClassInput, "AUC needs both classes");
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  // Twice the positive rank sum, so tied average ranks stay integral.
  std::int64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && s[j].first == s[i].first) ++j;
    const std::int64_t twice_avg_rank = static_cast<std::int64_t>(i + 1 + j);  // ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (s[k].second) twice_rank_sum += twice_avg_rank;
    }
    i = j;
  }
  const std::int64_t twice_u = twice_rank_sum - np * (np + 1);
  return static_cast<double>(twice_u) / static_cast<double>(2 * np * nn);
}

double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::LengthMismatch, "label vectors must have equal non-zero length");
  }
  const double n = static_cast<double>(a.size());
  std::int64_t agree = 0, a1 = 0, b1 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i] ? 1 : 0;
    a1 += a[i] ? 1 : 0;
    b1 += b[i] ? 1 : 0;
  }
  const double po = static_cast<double>(agree) / n;
  const double pa = static_cast<double>(a1) / n, pb = static_cast<double>(b1) / n;
  const double pe = pa * pb + (1.0 - pa) * (1.0 - pb);
  if (pe >= 1.0) throw Error(ErrorCode::DegenerateMarginals, "expected agreement is 1");
  return (po - pe) / (1.0 - pe);
}

double percentile(std::vector<double> samples, int per_mille) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  if (per_mille <= 0 || per_mille > 1000) throw Error(ErrorCode::InvalidArgument, "per_mille must be in (0,1000]");
  std::sort(samples.begin(), samples.end());
  const std::int64_t n = static_cast<std::int64_t>(samples.size());
  const std::int64_t rank = std::max<std::int64_t>(1, (per_mille * n + 999) / 1000);
  return samples[static_cast<std::size_t>(rank - 1)];
}

PercentileReport percentiles(const std::vector<double>& samples) {
  return {percentile(samples, 500), percentile(samples, 900), percentile(samples, 990)};
}

std::vector<LabeledExample> read_labels(const std::string& path) {
  std::vector<LabeledExample> out;
  for_each_line(path, [&](const json& j, const std::string& where) {
    ObjectReader r(j, where);
    LabeledExample e;
    e.entity = r.required<std::string>("entity");
    try {
      e.kind = entity_kind_from_string(r.required<std::string>("kind"));
    } catch (const Error& err) {
      r.fail(err.what());
    }
    e.label = r.required<bool>("label");
    e.label_b = r.optional<bool>("label_b");
    r.finish();
    out.push_back(std::move(e));
  });
  return out;
}

std::map<std::string, double> read_scores(const std::string& path) {
  std::map<std::string, double> out;
  for_each_line(path, [&](const json& j, const std::string& where) {
    ObjectReader r(j, where);
    const auto entity = r.required<std::string>("entity");
    const auto score = r.required<double>("score");
    r.finish();
    if (!out.emplace(entity, score).second) {
      throw Error(ErrorCode::JoinMismatch, where + ": entity '" + entity + "' scored twice");
    }
  });
  return out;
}

std::vector<LabeledExample> join_scores(std::vector<LabeledExample> labels, const std::map<std::string, double>& scores) {
  std::set<std::string> seen;
  for (auto& e : labels) {
    if (!seen.insert(e.entity).second) throw Error(ErrorCode::JoinMismatch, "entity '" + e.entity + "' labeled twice");
    const auto it = scores.find(e.entity);
    if (it == scores.end()) throw Error(ErrorCode::JoinMismatch, "no score for '" + e.entity + "'");
    e.score = it->second;
  }
  for (const auto& [entity, _] : scores) {
    if (!seen.count(entity)) throw Error(ErrorCode::JoinMismatch, "score for unlabeled entity '" + entity + "'");
  }
  return labels;
}

namespace {

MetricsReport full_metrics(const std::vector<LabeledExample>& ex, double threshold) {
  MetricsReport m = confusion_metrics(ex, threshold);
  try {
    m.auc = auc(ex);
  } catch (const Error&) {
    m.auc.reset();
  }
  const bool all_b = std::all_of(ex.begin(), ex.end(), [](const auto& e) { return e.label_b.has_value(); });
  if (all_b) {
    std::vector<bool> a, b;
    for (const auto& e : ex) {
      a.push_back(e.label);
      b.push_back(*e.label_b);
    }
    try {
      m.kappa = cohen_kappa(a, b);
    } catch (const Error&) {
      m.kappa.reset();
    }
  }
  return m;
}

}  // namespace

EvalReport evaluate(const std::vector<LabeledExample>& examples, double threshold) {
  EvalReport r;
  r.threshold = threshold;
  r.overall = full_metrics(examples, threshold);
  for (EntityKind k : kAllEntityKinds) {
    std::vector<LabeledExample> subset;
    std::copy_if(examples.begin(), examples.end(), std::back_inserter(subset),
                 [k](const auto& e) { return e.kind == k; });
    r.per_kind[k] = subset.empty() ? std::nullopt : std::optional(full_metrics(subset, threshold));
  }
  return r;
}

EvalReport run_eval(const std::string& labels_path, const std::string& scores_path, double threshold) {
  return evaluate(join_scores(read_labels(labels_path), read_scores(scores_path)), threshold);
}

EvalReport run_eval_live(const std::string& labels_path,
                         const std::function<double(const std::string&, EntityKind)>& scorer, double threshold) {
  auto labels = read_labels(labels_path);
  for (auto& e : labels) e.score = scorer(e.entity, e.kind);
  return evaluate(labels, threshold);
}

json metrics_to_json(const MetricsReport& m) {
  return json{{"n", m.n},
              {"tp", m.tp},
              {"fp", m.fp},
              {"tn", m.tn},
              {"fn", m.fn},
              {"precision", opt(m.precision)},
              {"recall", opt(m.recall)},
              {"f1", opt(m.f1)},
              {"auc", opt(m.auc)},
              {"kappa", opt(m.kappa)}};
}

json eval_report_to_json(const EvalReport& r) {
  json per_kind = json::object();
  for (const auto& [k, m] : r.per_kind) per_kind[std::string(to_string(k))] = m ? metrics_to_json(*m) : json(nullptr);
  return json{{"threshold", r.threshold}, {"overall", metrics_to_json(r.overall)}, {"per_kind", per_kind}};
}

}  // namespace guardsec
