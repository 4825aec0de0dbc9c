#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "guardsec/entity.hpp"
#include "guardsec/record_store.hpp"
#include "guardsec/time.hpp"
#include "json.hpp"

namespace guardsec {

struct ThreatReport {
  std::int64_t id = 0;
  EntityKind entity_kind = EntityKind::Url;
  std::string entity_canonical;
  std::string description;
  Timestamp reported_at{};
  std::optional<std::string> reporter_country;  // taken from the reporter's audit
  std::string reporter_fingerprint;             // salted hash of the reporter address
};

struct ReportSubmission {
  std::optional<EntityKind> kind;  // auto-detected when absent
  std::string value;
  std::string description;
  std::string reporter_ip;
  std::optional<std::string> reporter_country;
  Timestamp submitted_at{};
};

struct ReportAggregate {
  std::string entity_canonical;
  std::int64_t total_reports = 0;
  std::int64_t distinct_reporters = 0;
  double decayed_weight = 0.0;
  std::optional<Timestamp> last_seen;
};

struct ReportPolicy {
  double half_life_days = 90.0;
  std::size_t per_reporter_cap = 3;
  std::chrono::seconds dedup_window = std::chrono::hours(24);
  std::size_t max_description_chars = 2000;
};

struct SubmitResult {
  ThreatReport report;
  ReportAggregate aggregate;
};

// Community reports over the shared record log. Writes are serialized;
// readers see every accepted report.
class ReportStore {
 public:
  // Throws Error{SchemaViolation} if a stored report cannot be read back.
  ReportStore(RecordStore& store, std::string salt, NormalizeOptions normalize = {}, ReportPolicy policy = {});

  // Throws Error{MalformedEntity | DuplicateWithinWindow | DescriptionTooLong | StoreUnavailable}.
  SubmitResult submit(const ReportSubmission& submission);

  // Reports dated after `as_of` are ignored. Unknown entities give a zero aggregate.
  ReportAggregate aggregate(const std::string& entity_canonical, Timestamp as_of) const;

  const ReportPolicy& policy() const { return policy_; }

 private:
  RecordStore& store_;
  std::string salt_;
  NormalizeOptions normalize_;
  ReportPolicy policy_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::vector<ThreatReport>> by_entity_;
};

// Weight of a single report of the given age.
double report_decay(double age_days, double half_life_days);

nlohmann::json threat_report_to_json(const ThreatReport& r);

inline constexpr std::string_view kReportRecordType = "report";

}  // namespace guardsec
