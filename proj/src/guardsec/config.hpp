#pragma once

#include <optional>
#include <string>
#include <vector>

#include "guardsec/reports.hpp"
#include "guardsec/time.hpp"
#include "json.hpp"

namespace guardsec {

// Deployment configuration. Relative paths in a config file are resolved
// against the file's directory; see config/guardsec.json for the layout.
struct EngineConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string backend = "fixture";  // fixture | live
  std::vector<std::string> fixture_paths;
  std::string disposable_domains_path;
  std::string legal_suffixes_path;
  std::string store_path;  // empty keeps records in memory
  std::string catalog_dir;
  std::vector<std::string> locales{"en", "fr"};
  std::string default_locale = "en";
  std::string scoring_path;  // empty uses the built-in defaults
  std::string lexicon_path;
  std::string system_prompt_path;
  std::string salt = "guardsec-dev-salt";
  int trusted_hops = 1;
  std::string default_country;
  std::optional<Timestamp> fixed_clock;

  // rule_based answers every turn locally; remote posts to chat_url;
  // fixture replays chat_fixture_reply after chat_fixture_delay_ms.
  std::string chat_backend = "rule_based";
  std::string chat_url;
  std::string chat_fixture_reply;
  int chat_fixture_delay_ms = 0;
  int chat_deadline_ms = 3000;

  int rate_limit_per_minute = 60;  // 0 disables the limiter
  ReportPolicy report_policy;
};

// Defaults pointing at the bundled data directory.
EngineConfig default_engine_config(const std::string& data_dir);

// Throws Error{SchemaViolation}.
EngineConfig engine_config_from_json(const nlohmann::json& j, const std::string& base_dir);
// Reads the file and applies environment overrides. Throws Error{ParseError | SchemaViolation}.
EngineConfig load_engine_config(const std::string& path);

// GUARDSEC_PORT and GUARDSEC_STORE replace port and store_path when set.
void apply_env_overrides(EngineConfig& config);

// Data directory compiled into the build, overridable with GUARDSEC_DATA_DIR.
std::string default_data_dir();

}  // namespace guardsec
