#include "guardsec/reports.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "guardsec/error.hpp"
#include "guardsec/privacy.hpp"

namespace guardsec {

using nlohmann::json;

namespace {

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

ThreatReport report_from_json(const json& j) {
  try {
    ThreatReport r;
    r.id = j.at("id").get<std::int64_t>();
    r.entity_kind = entity_kind_from_string(j.at("entity_kind").get<std::string>());
    r.entity_canonical = j.at("entity_canonical").get<std::string>();
    r.description = j.at("description").get<std::string>();
    r.reported_at = parse_timestamp(j.at("reported_at").get<std::string>());
    if (!j.at("reporter_country").is_null()) r.reporter_country = j.at("reporter_country").get<std::string>();
    r.reporter_fingerprint = j.at("reporter_fingerprint").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("stored report: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("stored report: ") + e.what());
  }
}

}  // namespace

double report_decay(double age_days, double half_life_days) {
  return std::pow(0.5, std::max(0.0, age_days) / half_life_days);
}

json threat_report_to_json(const ThreatReport& r) {
  json j;
  j["id"] = r.id;
  j["entity_kind"] = std::string(to_string(r.entity_kind));
  j["entity_canonical"] = r.entity_canonical;
  j["description"] = r.description;
  j["reported_at"] = format_timestamp(r.reported_at);
  j["reporter_country"] = r.reporter_country ? json(*r.reporter_country) : json(nullptr);
  j["reporter_fingerprint"] = r.reporter_fingerprint;
  return j;
}

ReportStore::ReportStore(RecordStore& store, std::string salt, NormalizeOptions normalize, ReportPolicy policy)
    : store_(store), salt_(std::move(salt)), normalize_(std::move(normalize)), policy_(policy) {
  store_.for_each(kReportRecordType, [&](const json& j) {
    ThreatReport r = report_from_json(j);
    by_entity_[r.entity_canonical].push_back(std::move(r));
  });
}

SubmitResult ReportStore::submit(const ReportSubmission& s) {
  if (utf8_length(s.description) > policy_.max_description_chars) {
    throw Error(ErrorCode::DescriptionTooLong,
                "description exceeds " + std::to_string(policy_.max_description_chars) + " characters");
  }
  NormalizedEntity entity;
  try {
    const RawEntity raw{s.value, s.submitted_at};
    entity = normalize(s.kind.value_or(detect_kind(raw)), raw, normalize_);
  } catch (const Error& e) {
    if (!is_entity_parse_error(e.code())) throw;
    throw Error(ErrorCode::MalformedEntity, e.what());
  }

  ThreatReport report;
  report.entity_kind = entity.kind;
  report.entity_canonical = entity.canonical;
  report.description = s.description;
  report.reported_at = s.submitted_at;
  report.reporter_country = s.reporter_country;
  report.reporter_fingerprint = salted_hash(salt_, s.reporter_ip);

  std::unique_lock lock(mu_);
  const auto it = by_entity_.find(report.entity_canonical);
  if (it != by_entity_.end()) {
    for (const auto& prior : it->second) {
      if (prior.reporter_fingerprint != report.reporter_fingerprint) continue;
      const auto gap = report.reported_at > prior.reported_at ? report.reported_at - prior.reported_at
                                                              : prior.reported_at - report.reported_at;
      if (gap < policy_.dedup_window) {
        throw Error(ErrorCode::DuplicateWithinWindow, "this reporter already reported the entity in the last 24 h");
      }
    }
  }
  json body = threat_report_to_json(report);
  body.erase("id");
  report.id = store_.append(kReportRecordType, std::move(body));
  by_entity_[report.entity_canonical].push_back(report);
  lock.unlock();

  return SubmitResult{report, aggregate(report.entity_canonical, report.reported_at)};
}

ReportAggregate ReportStore::aggregate(const std::string& canonical, Timestamp as_of) const {
  ReportAggregate agg;
  agg.entity_canonical = canonical;
  std::map<std::string, std::vector<Timestamp>> by_reporter;
  {
    std::shared_lock lock(mu_);
    const auto it = by_entity_.find(canonical);
    if (it == by_entity_.end()) return agg;
    for (const auto& r : it->second) {
      if (r.reported_at > as_of) continue;
      ++agg.total_reports;
      by_reporter[r.reporter_fingerprint].push_back(r.reported_at);
      if (!agg.last_seen || r.reported_at > *agg.last_seen) agg.last_seen = r.reported_at;
    }
  }
  agg.distinct_reporters = static_cast<std::int64_t>(by_reporter.size());
  for (auto& [_, times] : by_reporter) {
    std::sort(times.begin(), times.end(), std::greater<>());
    const std::size_t n = std::min(times.size(), policy_.per_reporter_cap);
    for (std::size_t i = 0; i < n; ++i) {
      agg.decayed_weight += report_decay(age_in_days(times[i], as_of), policy_.half_life_days);
    }
  }
  return agg;
}

}  // namespace guardsec
