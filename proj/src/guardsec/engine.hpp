#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "guardsec/assistant.hpp"
#include "guardsec/config.hpp"
#include "guardsec/empreinte.hpp"
#include "guardsec/eval.hpp"
#include "guardsec/record_store.hpp"
#include "guardsec/reports.hpp"
#include "guardsec/verdict.hpp"
#include "guardsec/visitor_log.hpp"

namespace guardsec {

// Who is asking. Headers follow the HeaderMap conventions; an empty session
// id means the call is not attached to a chat session.
struct RequestContext {
  HeaderMap headers;
  std::string session_id;
  std::string locale;
};

struct ChatResult {
  ChatTurn turn;
  std::vector<Recommendation> recommendations;
  std::string locale;
};

// Composition root: owns the store, the providers and every service module.
class Engine {
 public:
  // Throws Error for unreadable data files or an invalid configuration.
  explicit Engine(EngineConfig config);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Entity errors propagate. Logging the interaction never fails the call.
  Verdict verify(const RawEntity& raw, std::optional<EntityKind> kind, const RequestContext& ctx = {});
  AuditReport audit(const ClientHints& hints, const RequestContext& ctx);
  // The reporter address comes from ctx.headers and the country from its audit.
  SubmitResult report(std::optional<EntityKind> kind, const std::string& value, const std::string& description,
                      const RequestContext& ctx);
  ChatResult chat(const std::string& text, const RequestContext& ctx);

  AggregateStats stats(Timestamp from, Timestamp to) const;
  // Every stored record in id order.
  std::vector<nlohmann::json> export_records() const;
  // Scores the labeled corpus through the verification pipeline.
  EvalReport eval_live(const std::string& labels_path, double threshold) const;

  const EngineConfig& config() const { return config_; }
  const Catalogs& catalogs() const { return *catalogs_; }
  const VerdictEngine& verdicts() const { return *verdicts_; }
  const Auditor& auditor() const { return *auditor_; }
  const Assistant& assistant() const { return *assistant_; }
  Timestamp now() const { return clock_(); }
  std::string resolve_locale(std::string_view requested) const;
  std::int64_t log_failures() const { return log_failures_.load(); }

 private:
  void log_visit(const AuditReport& audit, const RequestContext& ctx, const std::optional<QueryInfo>& query);

  EngineConfig config_;
  Clock clock_;
  std::shared_ptr<const Catalogs> catalogs_;
  std::unique_ptr<RecordStore> store_;
  std::unique_ptr<VisitorLog> visits_;
  std::unique_ptr<ReportStore> reports_;
  std::unique_ptr<VerdictEngine> verdicts_;
  std::unique_ptr<Auditor> auditor_;
  std::unique_ptr<Assistant> assistant_;
  SessionStore sessions_;
  std::atomic<std::int64_t> log_failures_{0};
};

}  // namespace guardsec
