#include "guardsec/engine.hpp"

#include <fstream>
#include <sstream>

#include "guardsec/error.hpp"
#include "guardsec/privacy.hpp"

namespace guardsec {

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string header(const HeaderMap& headers, std::string_view name) {
  for (const auto& [k, v] : headers) {
    if (k.size() != name.size()) continue;
    bool eq = true;
    for (std::size_t i = 0; i < k.size() && eq; ++i) {
      eq = std::tolower(static_cast<unsigned char>(k[i])) == std::tolower(static_cast<unsigned char>(name[i]));
    }
    if (eq) return v;
  }
  return {};
}

std::shared_ptr<ChatBackend> make_chat_backend(const EngineConfig& c) {
  if (c.chat_backend == "remote") return std::make_shared<HttpChatBackend>(c.chat_url, c.chat_deadline_ms);
  if (c.chat_backend == "fixture") return std::make_shared<FixtureChatBackend>(c.chat_fixture_reply, c.chat_fixture_delay_ms);
  return nullptr;
}

}  // namespace

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  clock_ = config_.fixed_clock ? fixed_clock(*config_.fixed_clock) : system_clock();
  catalogs_ = std::make_shared<const Catalogs>(Catalogs::load(config_.catalog_dir, config_.locales, config_.default_locale));

  std::unordered_set<std::string> disposable;
  if (!config_.disposable_domains_path.empty()) disposable = load_domain_list(config_.disposable_domains_path);
  std::shared_ptr<const IntelBackend> backend;
  if (config_.backend == "live") {
    backend = std::make_shared<LiveBackend>(std::move(disposable));
  } else {
    FixtureSet fixtures;
    for (const auto& p : config_.fixture_paths) load_fixtures_into(fixtures, p);
    backend = std::make_shared<FixtureBackend>(std::move(fixtures), std::move(disposable));
  }
  const IntelClient intel(backend);

  NormalizeOptions normalize;
  normalize.default_country = config_.default_country;
  if (!config_.legal_suffixes_path.empty()) normalize.legal_suffixes = load_legal_suffixes(config_.legal_suffixes_path);

  ScoringConfig scoring = config_.scoring_path.empty() ? default_scoring_config() : load_scoring_config(config_.scoring_path);

  store_ = std::make_unique<RecordStore>(config_.store_path);
  visits_ = std::make_unique<VisitorLog>(*store_);
  reports_ = std::make_unique<ReportStore>(*store_, config_.salt, normalize, config_.report_policy);

  VerdictEngine::Hooks hooks;
  hooks.report_weight = [this](const NormalizedEntity& e, Timestamp as_of) {
    return reports_->aggregate(e.canonical, as_of).decayed_weight;
  };
  verdicts_ = std::make_unique<VerdictEngine>(intel, std::move(scoring), normalize, catalogs_, clock_, std::move(hooks));

  AuditOptions audit_options;
  audit_options.trusted_hops = config_.trusted_hops;
  audit_options.deadline_ms = verdicts_->scoring().per_call_deadline_ms;
  auditor_ = std::make_unique<Auditor>(intel, audit_options);

  AssistantOptions assistant_options;
  assistant_options.remote_deadline_ms = config_.chat_deadline_ms;
  if (!config_.system_prompt_path.empty()) assistant_options.system_prompt = read_text(config_.system_prompt_path);
  assistant_ = std::make_unique<Assistant>(make_chat_backend(config_), catalogs_, Lexicon::load(config_.lexicon_path),
                                           std::move(assistant_options));
}

std::string Engine::resolve_locale(std::string_view requested) const {
  if (!requested.empty() && catalogs_->has_locale(requested)) return std::string(requested);
  return config_.default_locale;
}

void Engine::log_visit(const AuditReport& audit, const RequestContext& ctx, const std::optional<QueryInfo>& query) {
  try {
    const VisitorRecord rec = make_visitor_record(audit, header(ctx.headers, "user-agent"), config_.salt,
                                                  ctx.session_id, clock_(), query);
    visits_->log_interaction(rec);
  } catch (const std::exception&) {
    ++log_failures_;
  }
}

Verdict Engine::verify(const RawEntity& raw, std::optional<EntityKind> kind, const RequestContext& ctx) {
  const std::string locale = ctx.locale.empty() ? config_.default_locale : ctx.locale;
  Verdict v = verdicts_->verify(raw, kind, locale);
  if (!ctx.headers.empty()) {
    try {
      const AuditReport passive = auditor_->passive(ctx.headers);
      log_visit(passive, ctx, QueryInfo{std::string(to_string(v.entity.kind)), v.entity.canonical, v.score});
    } catch (const Error&) {
      ++log_failures_;
    }
  }
  if (!ctx.session_id.empty()) {
    auto h = sessions_.open(ctx.session_id, v.locale);
    std::lock_guard lock(*h.lock);
    h.context->last_verdict = v;
  }
  return v;
}

AuditReport Engine::audit(const ClientHints& hints, const RequestContext& ctx) {
  AuditReport r = auditor_->audit(ctx.headers, hints);
  log_visit(r, ctx, std::nullopt);
  if (!ctx.session_id.empty()) {
    auto h = sessions_.open(ctx.session_id, resolve_locale(ctx.locale));
    std::lock_guard lock(*h.lock);
    h.context->last_audit = r;
  }
  return r;
}

SubmitResult Engine::report(std::optional<EntityKind> kind, const std::string& value, const std::string& description,
                            const RequestContext& ctx) {
  ReportSubmission s;
  s.kind = kind;
  s.value = value;
  s.description = description;
  s.reporter_ip = resolve_client_ip(ctx.headers, config_.trusted_hops);
  s.submitted_at = clock_();
  try {
    s.reporter_country = auditor_->audit(ctx.headers).profile.geo.country;
  } catch (const Error&) {
  }
  return reports_->submit(s);
}

ChatResult Engine::chat(const std::string& text, const RequestContext& ctx) {
  ChatResult out;
  if (ctx.session_id.empty()) {
    SessionContext context;
    context.locale = resolve_locale(ctx.locale);
    out.turn = assistant_->chat(text, context);
    out.recommendations = assistant_->recommend(context);
    out.locale = context.locale;
    return out;
  }
  auto h = sessions_.open(ctx.session_id, resolve_locale(ctx.locale));
  std::lock_guard lock(*h.lock);
  if (!ctx.locale.empty()) h.context->locale = resolve_locale(ctx.locale);
  out.turn = assistant_->chat(text, *h.context);
  out.recommendations = assistant_->recommend(*h.context);
  out.locale = h.context->locale;
  return out;
}

AggregateStats Engine::stats(Timestamp from, Timestamp to) const {
  return visits_->aggregate_stats(from, to);
}

std::vector<nlohmann::json> Engine::export_records() const {
  std::vector<nlohmann::json> out;
  store_->for_each("", [&](const nlohmann::json& j) { out.push_back(j); });
  return out;
}

EvalReport Engine::eval_live(const std::string& labels_path, double threshold) const {
  return run_eval_live(
      labels_path,
      [this](const std::string& entity, EntityKind kind) { return verdicts_->verify(RawEntity{entity, {}}, kind).score; },
      threshold);
}

}  // namespace guardsec
