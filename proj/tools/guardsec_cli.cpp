// Command-line front end. Talks to the engine only through the C API.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "guardsec/guardsec.h"
#include "json.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

int exit_code_for(gs_status s) {
  switch (s) {
    case GS_OK: return kExitOk;
    case GS_INTERNAL:
    case GS_STORE_UNAVAILABLE:
    case GS_BIND_FAILURE: return kExitInternal;
    default: return kExitUser;
  }
}

int report_failure(gs_status s) {
  std::cerr << "error: " << gs_status_name(s) << ": " << gs_last_error() << "\n";
  return exit_code_for(s);
}

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  gs_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

// A JSON object, or raw "Name: value" header lines.
std::string headers_file_to_json(const std::string& path) {
  const std::string text = read_file(path);
  if (trim(text).rfind('{', 0) == 0) return text;
  json j = json::object();
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos || colon == 0) throw std::runtime_error("bad header line '" + line + "'");
    j[trim(line.substr(0, colon))] = trim(line.substr(colon + 1));
  }
  return j.dump();
}

void print_verdict(const json& v) {
  std::cout << v["label"].get<std::string>() << " " << v["display_score"].get<int>() << "/100  "
            << v["entity"]["kind"].get<std::string>() << " " << v["entity"]["canonical"].get<std::string>() << "\n";
  std::cout << v["explanation"].get<std::string>() << "\n";
  for (const auto& d : v["dominant_features"]) {
    std::printf("  %-14s %.4f\n", d["feature"].get<std::string>().c_str(), d["contribution"].get<double>());
  }
  if (!v["degraded"].empty()) {
    std::cout << "degraded:";
    for (const auto& s : v["degraded"]) std::cout << " " << s.get<std::string>();
    std::cout << "\n";
  }
}

void print_audit(const json& a) {
  const auto& net = a["profile"]["net"];
  std::cout << "ip " << net["ip"].get<std::string>() << "  connection " << net["connection_type"].get<std::string>()
            << "\n";
  for (const auto& i : a["indicators"]) {
    std::printf("  [%c] %-22s %-8s %s\n", i["triggered"].get<bool>() ? 'x' : ' ', i["name"].get<std::string>().c_str(),
                i["severity"].get<std::string>().c_str(), i["detail"].get<std::string>().c_str());
  }
  if (a["tz_mismatch"].get<bool>()) std::cout << "timezone mismatch with declared zone\n";
  std::printf("abuse score %.2f\n", a["abuse_score"].get<double>());
}

std::string fmt_opt(const json& v, const char* f = "%.4f") {
  if (v.is_null()) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, f, v.get<double>());
  return buf;
}

void print_metrics(const std::string& name, const json& m) {
  std::printf("%-9s n=%-4lld tp=%-3lld fp=%-3lld tn=%-3lld fn=%-3lld P=%s R=%s F1=%s AUC=%s kappa=%s\n", name.c_str(),
              m["n"].get<long long>(), m["tp"].get<long long>(), m["fp"].get<long long>(), m["tn"].get<long long>(),
              m["fn"].get<long long>(), fmt_opt(m["precision"]).c_str(), fmt_opt(m["recall"]).c_str(),
              fmt_opt(m["f1"]).c_str(), fmt_opt(m["auc"]).c_str(), fmt_opt(m["kappa"]).c_str());
}

void print_eval(const json& r) {
  std::printf("threshold %.4f\n", r["threshold"].get<double>());
  print_metrics("overall", r["overall"]);
  for (const auto& [kind, m] : r["per_kind"].items()) {
    if (m.is_null()) {
      std::printf("%-9s absent\n", kind.c_str());
    } else {
      print_metrics(kind, m);
    }
  }
}

void print_stats(const json& s) {
  std::printf("records %lld\n", s["total"].get<long long>());
  std::printf("vpn/proxy      %s (%lld)\n", fmt_opt(s["vpn_rate"]).c_str(), s["vpn"].get<long long>());
  std::printf("dns leak | vpn %s (%lld)\n", fmt_opt(s["dns_leak_rate_among_vpn"]).c_str(),
              s["dns_leak_among_vpn"].get<long long>());
  std::printf("datacenter     %s (%lld)\n", fmt_opt(s["datacenter_rate"]).c_str(), s["datacenter"].get<long long>());
  std::printf("abuse > 0      %s (%lld)\n", fmt_opt(s["abuse_nonzero_rate"]).c_str(),
              s["abuse_nonzero"].get<long long>());
}

struct EngineHandle {
  gs_engine* engine = nullptr;
  ~EngineHandle() { gs_engine_close(engine); }
};

gs_status open_engine(const std::string& config, EngineHandle& h) {
  return gs_engine_open(config.empty() ? nullptr : config.c_str(), &h.engine);
}

const char* opt_cstr(const std::string& s) {
  return s.empty() ? nullptr : s.c_str();
}

int emit(gs_status s, char** out, bool as_json, void (*human)(const json&)) {
  if (s != GS_OK) return report_failure(s);
  const std::string text = take(*out);
  if (as_json || !human) {
    std::cout << text << "\n";
  } else {
    human(json::parse(text));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GuardSec fraud verification"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config;
  bool as_json = false;
  app.add_option("--config", config, "Engine configuration file")->check(CLI::ExistingFile);
  app.add_flag("--json", as_json, "Structured output");

  std::string value, kind, locale, desc, headers, hints, from_ip = "127.0.0.1";
  std::string labels, scores, from, to, host, session;
  double threshold = 0.25;
  bool live = false;
  int port = 0;

  auto* verify = app.add_subcommand("verify", "Verify a URL, domain, email, phone number or business name");
  verify->add_option("value", value, "Entity to verify")->required();
  verify->add_option("--kind", kind, "url|domain|email|phone|business (auto-detected when omitted)");
  verify->add_option("--locale", locale, "Explanation locale");

  auto* audit = app.add_subcommand("audit", "Audit a connection from recorded request headers");
  audit->add_option("--headers", headers, "JSON object or 'Name: value' lines")->required()->check(CLI::ExistingFile);
  audit->add_option("--hints", hints, "Client hints JSON file")->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "Submit a community threat report");
  report->add_option("value", value, "Reported entity")->required();
  report->add_option("--kind", kind, "Entity kind");
  report->add_option("--desc", desc, "What happened")->required();
  report->add_option("--reporter-ip", from_ip, "Reporter address");

  auto* chat = app.add_subcommand("chat", "Ask the assistant one question");
  chat->add_option("text", value, "Question")->required();
  chat->add_option("--session", session, "Session id");
  chat->add_option("--locale", locale, "Reply locale");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", host, "Listen address (config value when omitted)");
  serve->add_option("--port", port, "Listen port (config value when omitted)")->check(CLI::Range(1, 65535));

  auto* eval = app.add_subcommand("eval", "Compute detection metrics for a labeled corpus");
  eval->add_option("--labels", labels, "Labels JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--scores", scores, "Scores JSONL")->check(CLI::ExistingFile);
  eval->add_option("--threshold", threshold, "Decision threshold")->check(CLI::Range(0.0, 1.0));
  eval->add_flag("--live", live, "Score the corpus through the engine instead of reading scores");

  auto* stats = app.add_subcommand("stats", "Aggregate connection statistics over a time window");
  stats->add_option("--from", from, "Window start (inclusive)")->required();
  stats->add_option("--to", to, "Window end (inclusive)")->required();

  auto* exp = app.add_subcommand("export", "Write every stored record as JSON lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUser;
  }

  try {
    if (*eval && !live) {
      if (scores.empty()) {
        std::cerr << "error: eval needs --scores or --live\n";
        return kExitUser;
      }
      char* out = nullptr;
      return emit(gs_eval(labels.c_str(), scores.c_str(), threshold, &out), &out, as_json, print_eval);
    }

    EngineHandle h;
    if (const gs_status s = open_engine(config, h); s != GS_OK) return report_failure(s);
    char* out = nullptr;

    if (*verify) {
      return emit(gs_verify(h.engine, value.c_str(), opt_cstr(kind), opt_cstr(locale), &out), &out, as_json,
                  print_verdict);
    }
    if (*audit) {
      const std::string hdrs = headers_file_to_json(headers);
      const std::string hint_text = hints.empty() ? std::string() : read_file(hints);
      return emit(gs_audit(h.engine, hdrs.c_str(), opt_cstr(hint_text), &out), &out, as_json, print_audit);
    }
    if (*report) {
      const std::string hdrs = json{{"remote-addr", from_ip}}.dump();
      return emit(gs_report(h.engine, value.c_str(), opt_cstr(kind), desc.c_str(), hdrs.c_str(), &out), &out, as_json,
                  [](const json& r) {
                    const auto& a = r["aggregate"];
                    std::printf("accepted report %lld for %s\n", r["report"]["id"].get<long long>(),
                                a["entity_canonical"].get<std::string>().c_str());
                    std::printf("reports %lld, distinct reporters %lld, weight %.4f\n",
                                a["total_reports"].get<long long>(), a["distinct_reporters"].get<long long>(),
                                a["decayed_weight"].get<double>());
                  });
    }
    if (*chat) {
      return emit(gs_chat(h.engine, opt_cstr(session), value.c_str(), opt_cstr(locale), &out), &out, as_json,
                  [](const json& t) { std::cout << t["reply_text"].get<std::string>() << "\n"; });
    }
    if (*eval) {
      return emit(gs_eval_live(h.engine, labels.c_str(), &out), &out, as_json, print_eval);
    }
    if (*stats) {
      return emit(gs_stats(h.engine, from.c_str(), to.c_str(), &out), &out, as_json, print_stats);
    }
    if (*exp) {
      const gs_status s = gs_export(h.engine, &out);
      if (s != GS_OK) return report_failure(s);
      std::cout << take(out);
      return kExitOk;
    }
    if (*serve) {
      // Signals are taken synchronously on a helper thread so shutdown goes
      // through the normal stop path.
      sigset_t set;
      sigemptyset(&set);
      sigaddset(&set, SIGINT);
      sigaddset(&set, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &set, nullptr);
      std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        gs_serve_stop(h.engine);
      });
      waiter.detach();
      std::cerr << "serving on " << (host.empty() ? "configured address" : host) << "\n";
      const gs_status s = gs_serve(h.engine, opt_cstr(host), port);
      if (s != GS_OK) return report_failure(s);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUser;
  }
  return kExitInternal;
}
