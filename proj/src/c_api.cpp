#include "guardsec/guardsec.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>

#include "guardsec/config.hpp"
#include "guardsec/engine.hpp"
#include "guardsec/error.hpp"
#include "guardsec/eval.hpp"
#include "guardsec/render.hpp"
#include "guardsec/service.hpp"
#include "json.hpp"

using guardsec::Error;
using guardsec::ErrorCode;
using nlohmann::json;

static_assert(static_cast<int>(ErrorCode::Ok) == GS_OK);
static_assert(static_cast<int>(ErrorCode::InvalidArgument) == GS_INVALID_ARGUMENT);
static_assert(static_cast<int>(ErrorCode::EmptyInput) == GS_EMPTY_INPUT);
static_assert(static_cast<int>(ErrorCode::InputTooLong) == GS_INPUT_TOO_LONG);
static_assert(static_cast<int>(ErrorCode::MalformedUrl) == GS_MALFORMED_URL);
static_assert(static_cast<int>(ErrorCode::MalformedEmail) == GS_MALFORMED_EMAIL);
static_assert(static_cast<int>(ErrorCode::MalformedPhone) == GS_MALFORMED_PHONE);
static_assert(static_cast<int>(ErrorCode::MalformedDomain) == GS_MALFORMED_DOMAIN);
static_assert(static_cast<int>(ErrorCode::EmptyAfterNormalization) == GS_EMPTY_AFTER_NORMALIZATION);
static_assert(static_cast<int>(ErrorCode::MalformedEntity) == GS_MALFORMED_ENTITY);
static_assert(static_cast<int>(ErrorCode::UnknownProvider) == GS_UNKNOWN_PROVIDER);
static_assert(static_cast<int>(ErrorCode::InapplicableKind) == GS_INAPPLICABLE_KIND);
static_assert(static_cast<int>(ErrorCode::ParseError) == GS_PARSE_ERROR);
static_assert(static_cast<int>(ErrorCode::DuplicateKey) == GS_DUPLICATE_KEY);
static_assert(static_cast<int>(ErrorCode::SchemaViolation) == GS_SCHEMA_VIOLATION);
static_assert(static_cast<int>(ErrorCode::NonPositiveCost) == GS_NON_POSITIVE_COST);
static_assert(static_cast<int>(ErrorCode::MissingWeightTable) == GS_MISSING_WEIGHT_TABLE);
static_assert(static_cast<int>(ErrorCode::UnknownLocale) == GS_UNKNOWN_LOCALE);
static_assert(static_cast<int>(ErrorCode::MissingSourceAddress) == GS_MISSING_SOURCE_ADDRESS);
static_assert(static_cast<int>(ErrorCode::DuplicateWithinWindow) == GS_DUPLICATE_WITHIN_WINDOW);
static_assert(static_cast<int>(ErrorCode::DescriptionTooLong) == GS_DESCRIPTION_TOO_LONG);
static_assert(static_cast<int>(ErrorCode::StoreUnavailable) == GS_STORE_UNAVAILABLE);
static_assert(static_cast<int>(ErrorCode::SingleClassInput) == GS_SINGLE_CLASS_INPUT);
static_assert(static_cast<int>(ErrorCode::LengthMismatch) == GS_LENGTH_MISMATCH);
static_assert(static_cast<int>(ErrorCode::DegenerateMarginals) == GS_DEGENERATE_MARGINALS);
static_assert(static_cast<int>(ErrorCode::JoinMismatch) == GS_JOIN_MISMATCH);
static_assert(static_cast<int>(ErrorCode::BindFailure) == GS_BIND_FAILURE);
static_assert(static_cast<int>(ErrorCode::RateLimited) == GS_RATE_LIMITED);
static_assert(static_cast<int>(ErrorCode::NotFound) == GS_NOT_FOUND);
static_assert(static_cast<int>(ErrorCode::Internal) == GS_INTERNAL);

struct gs_engine {
  std::unique_ptr<guardsec::Engine> engine;
  std::mutex service_mu;
  std::unique_ptr<guardsec::Service> service;
};

namespace {

thread_local std::string last_error;

gs_status fail(ErrorCode code, const std::string& message) {
  last_error = message;
  return static_cast<gs_status>(code);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class Fn>
gs_status guarded(char** out, Fn&& fn) {
  if (out) *out = nullptr;
  last_error.clear();
  try {
    std::string result = fn();
    if (out) {
      *out = dup(result);
      if (!*out) return fail(ErrorCode::Internal, "out of memory");
    }
    return GS_OK;
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const json::exception& e) {
    return fail(ErrorCode::SchemaViolation, e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCode::Internal, e.what());
  }
}

std::string opt_str(const char* s) {
  return s ? std::string(s) : std::string();
}

void require(bool cond, const char* what) {
  if (!cond) throw Error(ErrorCode::InvalidArgument, what);
}

json parse_object(const char* text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, std::string(what) + " must be an object");
  return j;
}

guardsec::HeaderMap parse_headers(const char* text) {
  guardsec::HeaderMap h;
  if (!text) return h;
  const json object = parse_object(text, "headers");
  for (const auto& [k, v] : object.items()) {
    if (!v.is_string()) throw Error(ErrorCode::SchemaViolation, "header '" + k + "' must be a string");
    std::string name = k;
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    h[name] = v.get<std::string>();
  }
  return h;
}

std::optional<guardsec::EntityKind> parse_kind(const char* kind) {
  if (!kind || !*kind) return std::nullopt;
  return guardsec::entity_kind_from_string(kind);
}

gs_status open_with(guardsec::EngineConfig config, gs_engine** out) {
  if (out) *out = nullptr;
  last_error.clear();
  if (!out) return fail(ErrorCode::InvalidArgument, "out must not be NULL");
  try {
    auto e = std::make_unique<gs_engine>();
    e->engine = std::make_unique<guardsec::Engine>(std::move(config));
    *out = e.release();
    return GS_OK;
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCode::Internal, e.what());
  }
}

}  // namespace

extern "C" {

const char* gs_version(void) {
  return "1.0.0";
}

const char* gs_status_name(gs_status status) {
  if (status < GS_OK || status > GS_INTERNAL) return "Unknown";
  return guardsec::error_code_name(static_cast<ErrorCode>(status)).data();
}

const char* gs_last_error(void) {
  return last_error.c_str();
}

void gs_string_free(char* s) {
  std::free(s);
}

gs_status gs_engine_open(const char* config_path, gs_engine** out) {
  guardsec::EngineConfig config;
  try {
    if (config_path) {
      config = guardsec::load_engine_config(config_path);
    } else {
      config = guardsec::default_engine_config(guardsec::default_data_dir());
      guardsec::apply_env_overrides(config);
    }
  } catch (const Error& e) {
    if (out) *out = nullptr;
    return fail(e.code(), e.what());
  }
  return open_with(std::move(config), out);
}

gs_status gs_engine_open_json(const char* config_json, const char* base_dir, gs_engine** out) {
  guardsec::EngineConfig config;
  try {
    require(config_json != nullptr, "config_json must not be NULL");
    const std::string base = base_dir ? base_dir : std::filesystem::current_path().string();
    config = guardsec::engine_config_from_json(parse_object(config_json, "config"), base);
    guardsec::apply_env_overrides(config);
  } catch (const Error& e) {
    if (out) *out = nullptr;
    return fail(e.code(), e.what());
  }
  return open_with(std::move(config), out);
}

void gs_engine_close(gs_engine* engine) {
  delete engine;
}

gs_status gs_verify(gs_engine* engine, const char* value, const char* kind, const char* locale, char** out_json) {
  return guarded(out_json, [&] {
    require(engine && value && out_json, "engine, value and out_json are required");
    guardsec::RequestContext ctx;
    ctx.locale = engine->engine->resolve_locale(opt_str(locale));
    const auto v = engine->engine->verify(guardsec::RawEntity{value, {}}, parse_kind(kind), ctx);
    return guardsec::verdict_to_json(v).dump();
  });
}

gs_status gs_audit(gs_engine* engine, const char* headers_json, const char* hints_json, char** out_json) {
  return guarded(out_json, [&] {
    require(engine && headers_json && out_json, "engine, headers_json and out_json are required");
    guardsec::RequestContext ctx;
    ctx.headers = parse_headers(headers_json);
    guardsec::ClientHints hints;
    if (hints_json) {
      const json h = parse_object(hints_json, "hints");
      if (h.contains("declared_timezone")) hints.declared_timezone = h.at("declared_timezone").get<std::string>();
      if (h.contains("cookies")) hints.cookies = h.at("cookies").get<bool>();
      if (h.contains("javascript")) hints.javascript = h.at("javascript").get<bool>();
      if (h.contains("resolver_asn")) hints.resolver_asn = h.at("resolver_asn").get<std::int64_t>();
    }
    const auto& e = *engine->engine;
    return guardsec::audit_to_json(engine->engine->audit(hints, ctx), &e.catalogs(), e.config().default_locale).dump();
  });
}

gs_status gs_report(gs_engine* engine, const char* value, const char* kind, const char* description,
                    const char* headers_json, char** out_json) {
  return guarded(out_json, [&] {
    require(engine && value && headers_json && out_json, "engine, value, headers_json and out_json are required");
    guardsec::RequestContext ctx;
    ctx.headers = parse_headers(headers_json);
    std::optional<guardsec::EntityKind> k;
    try {
      k = parse_kind(kind);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedEntity, e.what());
    }
    return guardsec::submit_result_to_json(engine->engine->report(k, value, opt_str(description), ctx)).dump();
  });
}

gs_status gs_chat(gs_engine* engine, const char* session, const char* text, const char* locale, char** out_json) {
  return guarded(out_json, [&] {
    require(engine && text && out_json, "engine, text and out_json are required");
    guardsec::RequestContext ctx;
    ctx.session_id = opt_str(session);
    ctx.locale = opt_str(locale);
    const auto r = engine->engine->chat(text, ctx);
    json j = guardsec::chat_turn_to_json(r.turn);
    j["recommendations"] = guardsec::recommendations_to_json(r.recommendations, &engine->engine->catalogs(), r.locale);
    j["locale"] = r.locale;
    return j.dump();
  });
}

gs_status gs_stats(gs_engine* engine, const char* from, const char* to, char** out_json) {
  return guarded(out_json, [&] {
    require(engine && from && to && out_json, "engine, from, to and out_json are required");
    return guardsec::stats_to_json(
               engine->engine->stats(guardsec::parse_timestamp(from), guardsec::parse_timestamp(to)))
        .dump();
  });
}

gs_status gs_export(gs_engine* engine, char** out_jsonl) {
  return guarded(out_jsonl, [&] {
    require(engine && out_jsonl, "engine and out_jsonl are required");
    std::string out;
    for (const auto& r : engine->engine->export_records()) out += r.dump() + "\n";
    return out;
  });
}

gs_status gs_eval(const char* labels_path, const char* scores_path, double threshold, char** out_json) {
  return guarded(out_json, [&] {
    require(labels_path && scores_path && out_json, "labels_path, scores_path and out_json are required");
    require(threshold > 0.0 && threshold < 1.0, "threshold must lie in (0, 1)");
    return guardsec::eval_report_to_json(guardsec::run_eval(labels_path, scores_path, threshold)).dump();
  });
}

gs_status gs_eval_live(gs_engine* engine, const char* labels_path, char** out_json) {
  return guarded(out_json, [&] {
    require(engine && labels_path && out_json, "engine, labels_path and out_json are required");
    const double threshold = engine->engine->verdicts().scoring().threshold;
    return guardsec::eval_report_to_json(engine->engine->eval_live(labels_path, threshold)).dump();
  });
}

gs_status gs_handle(gs_engine* engine, const char* method, const char* path, const char* headers_json,
                    const char* body, int* http_status, char** out_json) {
  return guarded(out_json, [&] {
    require(engine && method && path && http_status && out_json, "engine, method, path, http_status and out_json are required");
    guardsec::HttpRequest req;
    req.method = method;
    req.path = path;
    req.headers = parse_headers(headers_json);
    if (const auto it = req.headers.find("remote-addr"); it != req.headers.end()) {
      req.remote_addr = it->second;
      req.headers.erase(it);
    }
    req.body = opt_str(body);
    guardsec::Service* service = nullptr;
    {
      std::lock_guard lock(engine->service_mu);
      if (!engine->service) engine->service = std::make_unique<guardsec::Service>(*engine->engine);
      service = engine->service.get();
    }
    const auto res = service->handle(req);
    *http_status = res.status;
    return res.body.is_null() ? std::string() : res.body.dump();
  });
}

gs_status gs_serve(gs_engine* engine, const char* host, int port) {
  return guarded(nullptr, [&] {
    require(engine != nullptr, "engine must not be NULL");
    const auto& config = engine->engine->config();
    guardsec::Service* service = nullptr;
    {
      std::lock_guard lock(engine->service_mu);
      if (!engine->service) engine->service = std::make_unique<guardsec::Service>(*engine->engine);
      service = engine->service.get();
    }
    service->listen(host ? std::string(host) : config.host, port > 0 ? port : config.port);
    return std::string();
  });
}

void gs_serve_stop(gs_engine* engine) {
  if (!engine) return;
  std::lock_guard lock(engine->service_mu);
  if (engine->service) engine->service->stop();
}

}  // extern "C"
