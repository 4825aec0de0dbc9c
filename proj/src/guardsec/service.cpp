#include "guardsec/service.hpp"

#include <algorithm>

#include "guardsec/json_util.hpp"
#include "guardsec/render.hpp"
#include "httplib.h"

namespace guardsec {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxBodyBytes = 64 * 1024;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::int64_t ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

std::optional<EntityKind> read_kind(ObjectReader& r) {
  const auto kind = r.optional<std::string>("kind");
  if (!kind) return std::nullopt;
  return entity_kind_from_string(*kind);
}

void add_cors(HttpResponse& r) {
  r.headers.emplace_back("Access-Control-Allow-Origin", "*");
  r.headers.emplace_back("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
  r.headers.emplace_back("Access-Control-Allow-Headers", "Content-Type");
}

HttpResponse ok(json payload) {
  return HttpResponse{200, json{{"status", "ok"}, {"payload", std::move(payload)}}, {}};
}

}  // namespace

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return 200;
    case ErrorCode::EmptyInput:
    case ErrorCode::InputTooLong:
    case ErrorCode::MalformedUrl:
    case ErrorCode::MalformedEmail:
    case ErrorCode::MalformedPhone:
    case ErrorCode::MalformedDomain:
    case ErrorCode::EmptyAfterNormalization:
    case ErrorCode::MalformedEntity:
    case ErrorCode::InapplicableKind:
    case ErrorCode::DescriptionTooLong: return 422;
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParseError:
    case ErrorCode::SchemaViolation:
    case ErrorCode::UnknownLocale:
    case ErrorCode::MissingSourceAddress: return 400;
    case ErrorCode::DuplicateWithinWindow:
    case ErrorCode::DuplicateKey: return 409;
    case ErrorCode::RateLimited: return 429;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::StoreUnavailable: return 503;
    default: return 500;
  }
}

RateLimiter::RateLimiter(int per_minute, Now now) : per_minute_(per_minute), now_(std::move(now)) {}

bool RateLimiter::allow(const std::string& key) {
  if (per_minute_ <= 0) return true;
  const auto t = now_();
  std::lock_guard lock(mu_);
  auto [it, fresh] = buckets_.try_emplace(key, Bucket{static_cast<double>(per_minute_), t});
  Bucket& b = it->second;
  if (!fresh) {
    const double secs = std::chrono::duration<double>(t - b.last).count();
    b.tokens = std::min(static_cast<double>(per_minute_), b.tokens + secs * per_minute_ / 60.0);
    b.last = t;
  }
  if (b.tokens < 1.0) return false;
  b.tokens -= 1.0;
  return true;
}

struct Service::Server {
  httplib::Server http;
};

Service::Service(Engine& engine)
    : engine_(engine),
      limiter_(engine.config().rate_limit_per_minute),
      started_(std::chrono::steady_clock::now()),
      server_(std::make_unique<Server>()) {
  auto& http = server_->http;
  http.set_payload_max_length(kMaxBodyBytes);
  const auto bridge = [this](const httplib::Request& in, httplib::Response& out) {
    HttpRequest req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.headers) req.headers.emplace(lower(k), v);
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    req.body = in.body;
    req.remote_addr = in.remote_addr;
    const HttpResponse res = handle(req);
    out.status = res.status;
    for (const auto& [k, v] : res.headers) out.set_header(k, v);
    if (!res.body.is_null()) out.set_content(res.body.dump(), "application/json");
  };
  http.Get(".*", bridge);
  http.Post(".*", bridge);
  http.Options(".*", bridge);
}

Service::~Service() {
  stop();
}

std::string Service::client_key(const HttpRequest& req) const {
  HeaderMap h = req.headers;
  h["remote-addr"] = req.remote_addr;
  try {
    return resolve_client_ip(h, engine_.config().trusted_hops);
  } catch (const Error&) {
    return req.remote_addr;
  }
}

HttpResponse Service::error(ErrorCode code, const std::string& detail, const std::string& locale) const {
  const std::string name(error_code_name(code));
  return HttpResponse{http_status_for(code),
                      json{{"status", "error"},
                           {"payload",
                            {{"code", name},
                             {"message", engine_.catalogs().text(locale, "error." + name)},
                             {"detail", detail}}}},
                      {}};
}

HttpResponse Service::handle(const HttpRequest& req) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string locale = engine_.config().default_locale;
  if (const auto it = req.headers.find("accept-language"); it != req.headers.end() && it->second.size() >= 2) {
    locale = engine_.resolve_locale(lower(it->second.substr(0, 2)));
  }
  if (const auto it = req.query.find("locale"); it != req.query.end()) locale = engine_.resolve_locale(it->second);

  HttpResponse res;
  if (req.method == "OPTIONS") {
    res.status = 204;
    res.body = nullptr;
    add_cors(res);
    return res;
  }
  try {
    const bool known = req.path == "/api/verify" || req.path == "/api/empreinte" || req.path == "/api/report" ||
                       req.path == "/api/chat" || req.path == "/api/health";
    if (!known) throw Error(ErrorCode::NotFound, "no endpoint at " + req.path);
    const bool get_ok = req.path == "/api/empreinte" || req.path == "/api/health";
    const bool post_ok = req.path != "/api/health";
    if (!((req.method == "GET" && get_ok) || (req.method == "POST" && post_ok))) {
      throw Error(ErrorCode::InvalidArgument, req.method + " is not supported on " + req.path);
    }
    if (req.path == "/api/health") {
      res = health();
    } else {
      if (!limiter_.allow(client_key(req))) throw Error(ErrorCode::RateLimited, "request rate limit exceeded");
      json body = json::object();
      if (req.method == "POST" && !req.body.empty()) {
        try {
          body = json::parse(req.body);
        } catch (const json::parse_error& e) {
          throw Error(ErrorCode::ParseError, std::string("request body: ") + e.what());
        }
        if (!body.is_object()) throw Error(ErrorCode::SchemaViolation, "request body must be an object");
      }
      if (const auto it = body.find("locale"); it != body.end() && it->is_string()) {
        locale = engine_.resolve_locale(it->get<std::string>());
      }
      if (req.path == "/api/verify") res = verify(req, body, locale);
      else if (req.path == "/api/empreinte") res = empreinte(req, body, locale);
      else if (req.path == "/api/report") res = report(req, body, locale);
      else res = chat(req, body, locale);
    }
  } catch (const Error& e) {
    res = error(e.code(), e.what(), locale);
  } catch (const std::exception& e) {
    res = error(ErrorCode::Internal, e.what(), locale);
  }
  res.body["elapsed_ms"] = ms_since(t0);
  res.body["api_version"] = std::string(kApiVersion);
  add_cors(res);
  return res;
}

namespace {

RequestContext context_for(const HttpRequest& req, ObjectReader& r, const std::string& locale) {
  RequestContext ctx;
  ctx.headers = req.headers;
  ctx.headers["remote-addr"] = req.remote_addr;
  ctx.locale = locale;
  ctx.session_id = r.value_or<std::string>("session", "");
  if (ctx.session_id.empty()) {
    if (const auto it = req.query.find("session"); it != req.query.end()) ctx.session_id = it->second;
  }
  return ctx;
}

}  // namespace

HttpResponse Service::verify(const HttpRequest& req, const json& body, const std::string& locale) {
  ObjectReader r(body, "verify request", ErrorCode::InvalidArgument);
  r.optional<std::string>("locale");
  const auto value = r.required<std::string>("value");
  const auto kind = read_kind(r);
  const RequestContext ctx = context_for(req, r, locale);
  r.finish();
  return ok(verdict_to_json(engine_.verify(RawEntity{value, {}}, kind, ctx)));
}

HttpResponse Service::empreinte(const HttpRequest& req, const json& body, const std::string& locale) {
  ObjectReader r(body, "empreinte request", ErrorCode::InvalidArgument);
  r.optional<std::string>("locale");
  ClientHints hints;
  if (r.has("client_hints")) {
    const auto hints_json = r.required<json>("client_hints");
    ObjectReader h(hints_json, "client_hints", ErrorCode::InvalidArgument);
    hints.declared_timezone = h.optional<std::string>("declared_timezone");
    hints.cookies = h.optional<bool>("cookies");
    hints.javascript = h.optional<bool>("javascript");
    hints.resolver_asn = h.optional<std::int64_t>("resolver_asn");
    h.finish();
  }
  const RequestContext ctx = context_for(req, r, locale);
  r.finish();
  const AuditReport audit = engine_.audit(hints, ctx);
  SessionContext only_audit;
  only_audit.last_audit = audit;
  json payload = audit_to_json(audit, &engine_.catalogs(), locale);
  payload["recommendations"] =
      recommendations_to_json(engine_.assistant().recommend(only_audit), &engine_.catalogs(), locale);
  payload["locale"] = locale;
  return ok(std::move(payload));
}

HttpResponse Service::report(const HttpRequest& req, const json& body, const std::string& locale) {
  ObjectReader r(body, "report request", ErrorCode::InvalidArgument);
  r.optional<std::string>("locale");
  const auto value = r.required<std::string>("value");
  const auto description = r.value_or<std::string>("description", "");
  std::optional<EntityKind> kind;
  try {
    kind = read_kind(r);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedEntity, e.what());
  }
  const RequestContext ctx = context_for(req, r, locale);
  r.finish();
  json payload = submit_result_to_json(engine_.report(kind, value, description, ctx));
  payload["message"] = engine_.catalogs().text(locale, "report.accepted");
  return ok(std::move(payload));
}

HttpResponse Service::chat(const HttpRequest& req, const json& body, const std::string& locale) {
  ObjectReader r(body, "chat request", ErrorCode::InvalidArgument);
  r.optional<std::string>("locale");
  const auto text = r.required<std::string>("text");
  const RequestContext ctx = context_for(req, r, locale);
  r.finish();
  const ChatResult result = engine_.chat(text, ctx);
  json payload = chat_turn_to_json(result.turn);
  payload["recommendations"] = recommendations_to_json(result.recommendations, &engine_.catalogs(), result.locale);
  payload["locale"] = result.locale;
  return ok(std::move(payload));
}

HttpResponse Service::health() {
  const auto uptime = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - started_);
  return ok(json{{"ok", true}, {"uptime_s", uptime.count()}});
}

void Service::listen(const std::string& host, int port) {
  if (!server_->http.bind_to_port(host, port)) {
    throw Error(ErrorCode::BindFailure, "cannot bind " + host + ":" + std::to_string(port));
  }
  listen_after_bind();
}

int Service::bind_any_port(const std::string& host) {
  const int port = server_->http.bind_to_any_port(host);
  if (port < 0) throw Error(ErrorCode::BindFailure, "cannot bind " + host);
  return port;
}

void Service::listen_after_bind() {
  if (!server_->http.listen_after_bind()) throw Error(ErrorCode::BindFailure, "listener stopped unexpectedly");
}

void Service::stop() {
  if (server_) server_->http.stop();
}

}  // namespace guardsec
