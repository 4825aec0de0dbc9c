#pragma once

#include <string_view>
#include <vector>

#include "guardsec/assistant.hpp"
#include "guardsec/catalog.hpp"
#include "guardsec/empreinte.hpp"
#include "guardsec/reports.hpp"
#include "guardsec/verdict.hpp"
#include "guardsec/visitor_log.hpp"
#include "json.hpp"

namespace guardsec {

// Structured renderings shared by the service, the C API and the CLI.
// Schemas are documented in docs/api.md.

nlohmann::json entity_to_json(const NormalizedEntity& e);
nlohmann::json feature_vector_to_json(const FeatureVector& fv);
nlohmann::json verdict_to_json(const Verdict& v);
// With catalogs, triggered indicators also carry their recommendation text.
nlohmann::json audit_to_json(const AuditReport& r, const Catalogs* catalogs = nullptr, std::string_view locale = "en");
nlohmann::json chat_turn_to_json(const ChatTurn& t);
nlohmann::json recommendations_to_json(const std::vector<Recommendation>& recs, const Catalogs* catalogs = nullptr,
                                       std::string_view locale = "en");
nlohmann::json aggregate_to_json(const ReportAggregate& a);
nlohmann::json submit_result_to_json(const SubmitResult& r);
nlohmann::json stats_to_json(const AggregateStats& s);

// Drops wall-clock dependent members ("elapsed_ms", "uptime_s") at any depth.
nlohmann::json strip_volatile_fields(nlohmann::json j);

}  // namespace guardsec
