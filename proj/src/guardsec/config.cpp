#include "guardsec/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "guardsec/json_util.hpp"

#ifndef GUARDSEC_DEFAULT_DATA_DIR
#define GUARDSEC_DEFAULT_DATA_DIR "data"
#endif

namespace guardsec {

namespace fs = std::filesystem;

namespace {

std::string resolve_path(const std::string& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute() || base.empty()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

int parse_port(std::string_view text, std::string_view source) {
  int port = 0;
  for (char c : text) {
    if (c < '0' || c > '9' || port > 65535) {
      throw Error(ErrorCode::SchemaViolation, std::string(source) + ": invalid port '" + std::string(text) + "'");
    }
    port = port * 10 + (c - '0');
  }
  if (text.empty() || port < 1 || port > 65535) {
    throw Error(ErrorCode::SchemaViolation, std::string(source) + ": invalid port '" + std::string(text) + "'");
  }
  return port;
}

}  // namespace

std::string default_data_dir() {
  if (const char* env = std::getenv("GUARDSEC_DATA_DIR"); env && *env) return env;
  return GUARDSEC_DEFAULT_DATA_DIR;
}

EngineConfig default_engine_config(const std::string& data_dir) {
  EngineConfig c;
  const fs::path d(data_dir);
  c.fixture_paths = {(d / "fixtures/providers.jsonl").string()};
  c.disposable_domains_path = (d / "disposable_domains.txt").string();
  c.legal_suffixes_path = (d / "legal_suffixes.txt").string();
  c.catalog_dir = (d / "catalogs").string();
  c.lexicon_path = (d / "assistant/lexicon.txt").string();
  c.system_prompt_path = (d / "assistant/system_prompt.txt").string();
  return c;
}

EngineConfig engine_config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  EngineConfig c;
  ObjectReader r(j, "config");
  c.host = r.value_or<std::string>("host", c.host);
  if (r.has("port")) {
    c.port = r.required<int>("port");
    if (c.port < 1 || c.port > 65535) r.fail("port out of range");
  }
  c.backend = r.value_or<std::string>("backend", c.backend);
  if (c.backend != "fixture" && c.backend != "live") r.fail("backend must be 'fixture' or 'live'");
  for (auto& p : r.value_or<std::vector<std::string>>("fixtures", {})) {
    c.fixture_paths.push_back(resolve_path(base_dir, p));
  }
  c.disposable_domains_path = resolve_path(base_dir, r.value_or<std::string>("disposable_domains", ""));
  c.legal_suffixes_path = resolve_path(base_dir, r.value_or<std::string>("legal_suffixes", ""));
  c.store_path = resolve_path(base_dir, r.value_or<std::string>("store", ""));
  c.catalog_dir = resolve_path(base_dir, r.required<std::string>("catalogs"));
  c.locales = r.value_or("locales", c.locales);
  if (c.locales.empty()) r.fail("locales must not be empty");
  c.default_locale = r.value_or("default_locale", c.default_locale);
  c.scoring_path = resolve_path(base_dir, r.value_or<std::string>("scoring", ""));
  c.lexicon_path = resolve_path(base_dir, r.required<std::string>("lexicon"));
  c.system_prompt_path = resolve_path(base_dir, r.value_or<std::string>("system_prompt", ""));
  c.salt = r.value_or("salt", c.salt);
  if (c.salt.empty()) r.fail("salt must not be empty");
  c.trusted_hops = r.value_or("trusted_hops", c.trusted_hops);
  if (c.trusted_hops < 0) r.fail("trusted_hops must be >= 0");
  c.default_country = r.value_or("default_country", c.default_country);
  if (auto t = r.optional<std::string>("fixed_clock")) {
    try {
      c.fixed_clock = parse_timestamp(*t);
    } catch (const Error& e) {
      r.fail(std::string("fixed_clock: ") + e.what());
    }
  }
  if (r.has("chat")) {
    const auto chat_json = r.required<nlohmann::json>("chat");
    ObjectReader chat(chat_json, "config.chat");
    c.chat_backend = chat.value_or("backend", c.chat_backend);
    if (c.chat_backend != "rule_based" && c.chat_backend != "remote" && c.chat_backend != "fixture") {
      chat.fail("backend must be 'rule_based', 'remote' or 'fixture'");
    }
    c.chat_url = chat.value_or("url", c.chat_url);
    c.chat_fixture_reply = chat.value_or("fixture_reply", c.chat_fixture_reply);
    c.chat_fixture_delay_ms = chat.value_or("fixture_delay_ms", c.chat_fixture_delay_ms);
    c.chat_deadline_ms = chat.value_or("deadline_ms", c.chat_deadline_ms);
    if (c.chat_deadline_ms <= 0 || c.chat_fixture_delay_ms < 0) chat.fail("delays must be positive");
    if (c.chat_backend == "remote" && c.chat_url.empty()) chat.fail("remote backend needs a url");
    chat.finish();
  }
  c.rate_limit_per_minute = r.value_or("rate_limit_per_minute", c.rate_limit_per_minute);
  if (c.rate_limit_per_minute < 0) r.fail("rate_limit_per_minute must be >= 0");
  if (r.has("reports")) {
    const auto reports_json = r.required<nlohmann::json>("reports");
    ObjectReader rep(reports_json, "config.reports");
    auto& p = c.report_policy;
    p.half_life_days = rep.value_or("half_life_days", p.half_life_days);
    p.per_reporter_cap = rep.value_or("per_reporter_cap", p.per_reporter_cap);
    p.dedup_window = std::chrono::seconds(rep.value_or<std::int64_t>("dedup_window_s", p.dedup_window.count()));
    p.max_description_chars = rep.value_or("max_description_chars", p.max_description_chars);
    if (p.half_life_days <= 0 || p.per_reporter_cap == 0) rep.fail("half_life_days and per_reporter_cap must be positive");
    rep.finish();
  }
  r.finish();
  return c;
}

EngineConfig load_engine_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  EngineConfig c = engine_config_from_json(j, fs::path(path).parent_path().string());
  apply_env_overrides(c);
  return c;
}

void apply_env_overrides(EngineConfig& config) {
  if (const char* port = std::getenv("GUARDSEC_PORT"); port && *port) config.port = parse_port(port, "GUARDSEC_PORT");
  if (const char* store = std::getenv("GUARDSEC_STORE"); store) config.store_path = store;
}

}  // namespace guardsec
