#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "guardsec/config.hpp"
#include "guardsec/engine.hpp"
#include "guardsec/error.hpp"
#include "guardsec/eval.hpp"
#include "test_support.hpp"

using namespace guardsec;
using namespace guardsec::testing;
using nlohmann::json;

namespace {

const std::string kLabels = GUARDSEC_SOURCE_DIR "/data/corpus/labels.jsonl";
const std::string kScores = GUARDSEC_SOURCE_DIR "/data/corpus/scores.jsonl";
const std::string kGolden = GUARDSEC_SOURCE_DIR "/data/corpus/golden_metrics.json";

// Pairwise probability; ties count one half. Integer counts keep it exact.
double auc_oracle(const std::vector<LabeledExample>& ex) {
  std::int64_t twice = 0, pairs = 0;
  for (const auto& p : ex) {
    if (!p.label) continue;
    for (const auto& n : ex) {
      if (n.label) continue;
      ++pairs;
      twice += p.score > n.score ? 2 : p.score == n.score ? 1 : 0;
    }
  }
  return static_cast<double>(twice) / static_cast<double>(2 * pairs);
}

// Smallest sorted value whose cumulative share reaches the requested fraction.
double percentile_oracle(std::vector<double> v, int per_mille) {
  std::sort(v.begin(), v.end());
  const std::int64_t n = static_cast<std::int64_t>(v.size());
  for (std::int64_t k = 1; k <= n; ++k) {
    if (k * 1000 >= per_mille * n) return v[static_cast<std::size_t>(k - 1)];
  }
  return v.back();
}

void check_metrics(const MetricsReport& m, const json& g) {
  CHECK(m.n == g["n"].get<std::int64_t>());
  CHECK(m.tp == g["tp"].get<std::int64_t>());
  CHECK(m.fp == g["fp"].get<std::int64_t>());
  CHECK(m.tn == g["tn"].get<std::int64_t>());
  CHECK(m.fn == g["fn"].get<std::int64_t>());
  for (const auto& [name, value] : std::vector<std::pair<const char*, std::optional<double>>>{
           {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"auc", m.auc}, {"kappa", m.kappa}}) {
    CAPTURE(name);
    if (g[name].is_null()) {
      CHECK_FALSE(value.has_value());
    } else {
      REQUIRE(value.has_value());
      CHECK(*value == doctest::Approx(g[name].get<double>()).epsilon(1e-12));
    }
  }
}

void check_report(const EvalReport& r, const json& golden) {
  CHECK(r.threshold == golden["threshold"].get<double>());
  check_metrics(r.overall, golden["overall"]);
  for (EntityKind k : kAllEntityKinds) {
    CAPTURE(to_string(k));
    const auto& g = golden["per_kind"][std::string(to_string(k))];
    REQUIRE(r.per_kind.count(k));
    if (g.is_null()) {
      CHECK_FALSE(r.per_kind.at(k).has_value());
    } else {
      REQUIRE(r.per_kind.at(k).has_value());
      check_metrics(*r.per_kind.at(k), g);
    }
  }
}

json golden() {
  std::ifstream in(kGolden);
  return json::parse(in);
}

LabeledExample ex(bool label, double score) {
  return LabeledExample{"e", EntityKind::Url, label, score, std::nullopt};
}

}  // namespace

TEST_CASE("cohen's kappa") {
  CHECK(cohen_kappa({true, true, false, false}, {true, false, false, false}) == 0.5);
  CHECK(cohen_kappa({true, false, true, false}, {true, false, true, false}) == 1.0);
  CHECK(cohen_kappa({true, false}, {false, true}) == -1.0);
  CHECK_THROWS_AS(cohen_kappa({true}, {true, false}), Error);
  CHECK_THROWS_AS(cohen_kappa({}, {}), Error);
  try {
    cohen_kappa({true, true}, {true, true});
    FAIL("expected DegenerateMarginals");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateMarginals);
  }
}

TEST_CASE("AUC equals the brute-force pairwise probability") {
  std::mt19937 rng(2026);
  for (int round = 0; round < 200; ++round) {
    const int n = 2 + static_cast<int>(rng() % 199);
    std::vector<LabeledExample> set;
    // Coarse scores force plenty of ties.
    const int levels = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) set.push_back(ex(rng() % 2 == 0, static_cast<double>(rng() % levels) / levels));
    set[0].label = true;
    set[1].label = false;
    CHECK(auc(set) == auc_oracle(set));
  }
  CHECK(auc({ex(true, 0.9), ex(false, 0.1)}) == 1.0);
  CHECK(auc({ex(true, 0.5), ex(false, 0.5)}) == 0.5);
  CHECK_THROWS_AS(auc({ex(true, 0.5), ex(true, 0.1)}), Error);
}

TEST_CASE("nearest-rank percentiles equal the sort-based oracle") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(0.0, 5000.0);
  for (int round = 0; round < 500; ++round) {
    std::vector<double> v(1 + rng() % 400);
    for (double& x : v) x = rng() % 3 == 0 ? std::round(u(rng)) : u(rng);
    for (int pm : {1, 500, 900, 990, 999, 1000}) CHECK(percentile(v, pm) == percentile_oracle(v, pm));
  }
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  const auto p = percentiles(hundred);
  CHECK(p.p50 == 50.0);
  CHECK(p.p90 == 90.0);
  CHECK(p.p99 == 99.0);
  CHECK_THROWS_AS(percentile({}, 500), Error);
  CHECK_THROWS_AS(percentile({1.0}, 0), Error);
}

TEST_CASE("confusion metrics") {
  const std::vector<LabeledExample> set{ex(true, 0.9), ex(true, 0.2), ex(false, 0.3), ex(false, 0.1)};
  const auto m = confusion_metrics(set, 0.25);
  CHECK(m.tp == 1);
  CHECK(m.fn == 1);
  CHECK(m.fp == 1);
  CHECK(m.tn == 1);
  CHECK(*m.precision == 0.5);
  CHECK(*m.recall == 0.5);
  CHECK(*m.f1 == 0.5);
  const auto none = confusion_metrics({ex(false, 0.1), ex(true, 0.1)}, 0.25);
  CHECK_FALSE(none.precision.has_value());
  CHECK(*none.recall == 0.0);
  CHECK_FALSE(none.f1.has_value());
  CHECK(f1_score(0.877, 0.905) == doctest::Approx(0.89078).epsilon(1e-4));
  CHECK_FALSE(f1_score(0.0, 0.0).has_value());
  CHECK_THROWS_AS(confusion_metrics({}, 0.25), Error);
}

TEST_CASE("committed corpus reproduces the golden metrics") {
  check_report(run_eval(kLabels, kScores, 0.25), golden());
}

TEST_CASE("scoring the corpus through the pipeline reproduces the golden metrics") {
  Engine engine(load_engine_config(GUARDSEC_SOURCE_DIR "/config/corpus.json"));
  check_report(engine.eval_live(kLabels, 0.25), golden());
}

TEST_CASE("the corpus covers every kind and both annotators") {
  const auto labels = read_labels(kLabels);
  CHECK(labels.size() == 40);
  std::map<EntityKind, int> per_kind;
  for (const auto& l : labels) {
    per_kind[l.kind]++;
    CHECK(l.label_b.has_value());
  }
  for (EntityKind k : kAllEntityKinds) CHECK(per_kind[k] >= 5);
}

TEST_CASE("joins must match exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "guardsec_eval_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "labels.jsonl") << R"({"entity": "a.example", "kind": "domain", "label": true}
{"entity": "b.example", "kind": "domain", "label": false}
)";
    std::ofstream(dir / "extra.jsonl") << R"({"entity": "a.example", "score": 0.9}
{"entity": "b.example", "score": 0.1}
{"entity": "c.example", "score": 0.1}
)";
    std::ofstream(dir / "missing.jsonl") << R"({"entity": "a.example", "score": 0.9}
)";
    std::ofstream(dir / "bad.jsonl") << R"({"entity": "a.example", "score": "high"}
)";
  }
  const auto labels = (dir / "labels.jsonl").string();
  for (const char* f : {"extra.jsonl", "missing.jsonl"}) {
    try {
      run_eval(labels, (dir / f).string(), 0.25);
      FAIL("expected JoinMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::JoinMismatch);
    }
  }
  CHECK_THROWS_AS(run_eval(labels, (dir / "bad.jsonl").string(), 0.25), Error);

  const auto live = run_eval_live(labels, [](const std::string& e, EntityKind) { return e == "a.example" ? 1.0 : 0.0; },
                                  0.25);
  CHECK(live.overall.tp == 1);
  CHECK(live.overall.tn == 1);
  CHECK(*live.overall.auc == 1.0);
  CHECK_FALSE(live.per_kind.at(EntityKind::Phone).has_value());
  CHECK_FALSE(live.overall.kappa.has_value());
  CHECK(eval_report_to_json(live)["per_kind"]["phone"].is_null());
}
