#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "guardsec/error.hpp"
#include "guardsec/eval.hpp"
#include "guardsec/render.hpp"
#include "guardsec/service.hpp"
#include "httplib.h"
#include "test_support.hpp"

using namespace guardsec;
using namespace guardsec::testing;
using nlohmann::json;

namespace {

const std::string kGoldenDir = GUARDSEC_SOURCE_DIR "/tests/golden/service";

// GUARDSEC_UPDATE_GOLDEN=1 rewrites the expected responses instead of comparing.
bool updating() {
  const char* v = std::getenv("GUARDSEC_UPDATE_GOLDEN");
  return v && std::string(v) == "1";
}

HttpRequest request_from_json(const json& j) {
  HttpRequest r;
  r.method = j.at("method").get<std::string>();
  r.path = j.at("path").get<std::string>();
  r.remote_addr = j.value("remote_addr", "");
  const json headers = j.value("headers", json::object());
  const json query = j.value("query", json::object());
  for (const auto& [k, v] : headers.items()) r.headers[k] = v.get<std::string>();
  for (const auto& [k, v] : query.items()) r.query[k] = v.get<std::string>();
  if (j.contains("body")) r.body = j["body"].dump();
  if (j.contains("raw_body")) r.body = j["raw_body"].get<std::string>();
  return r;
}

json response_to_json(const HttpResponse& r) {
  json headers = json::object();
  for (const auto& [k, v] : r.headers) headers[k] = v;
  return json{{"status", r.status}, {"headers", headers}, {"body", strip_volatile_fields(r.body)}};
}

HttpRequest post(std::string path, json body, std::string ip = "198.51.100.10") {
  HttpRequest r;
  r.method = "POST";
  r.path = std::move(path);
  r.body = body.dump();
  r.remote_addr = std::move(ip);
  return r;
}

void replay(const std::string& name) {
  const auto path = kGoldenDir + "/" + name + ".json";
  json cases = json::parse(std::ifstream(path));
  Engine engine(test_engine_config());
  Service service(engine);
  for (auto& c : cases) {
    const std::string case_name = c["name"].get<std::string>();
    CAPTURE(case_name);
    const HttpResponse res = service.handle(request_from_json(c["request"]));
    CHECK(res.status != 401);
    CHECK(res.status != 403);
    CHECK(res.body.is_null() == (res.status == 204));
    if (!res.body.is_null()) {
      CHECK(res.body["elapsed_ms"].is_number_integer());
      CHECK(res.body["api_version"] == "1");
    }
    const json actual = response_to_json(res);
    if (updating()) {
      c["response"] = actual;
    } else {
      REQUIRE(c.contains("response"));
      CHECK(actual.dump(2) == c["response"].dump(2));
    }
  }
  if (updating()) std::ofstream(path) << cases.dump(2) << "\n";
}

}  // namespace

TEST_CASE("golden replay: verify") { replay("verify"); }
TEST_CASE("golden replay: empreinte") { replay("empreinte"); }
TEST_CASE("golden replay: report") { replay("report"); }
TEST_CASE("golden replay: chat") { replay("chat"); }
TEST_CASE("golden replay: health") { replay("health"); }

TEST_CASE("error codes map to statuses other than 401 and 403") {
  for (int c = 0; c <= static_cast<int>(ErrorCode::Internal); ++c) {
    const int s = http_status_for(static_cast<ErrorCode>(c));
    CAPTURE(error_code_name(static_cast<ErrorCode>(c)));
    CHECK(s != 401);
    CHECK(s != 403);
    CHECK(s >= 200);
    CHECK(s < 600);
  }
  CHECK(http_status_for(ErrorCode::MalformedEntity) == 422);
  CHECK(http_status_for(ErrorCode::RateLimited) == 429);
  CHECK(http_status_for(ErrorCode::DuplicateWithinWindow) == 409);
}

TEST_CASE("every endpoint answers without credentials") {
  Engine engine(test_engine_config());
  Service service(engine);
  for (const auto& [method, path] : std::vector<std::pair<std::string, std::string>>{
           {"POST", "/api/verify"}, {"GET", "/api/empreinte"}, {"POST", "/api/report"}, {"POST", "/api/chat"},
           {"GET", "/api/health"}, {"DELETE", "/api/verify"}, {"GET", "/"}}) {
    HttpRequest r;
    r.method = method;
    r.path = path;
    r.remote_addr = "198.51.100.10";
    r.headers["authorization"] = "Bearer nonsense";
    const auto res = service.handle(r);
    CAPTURE(path);
    CHECK(res.status != 401);
    CHECK(res.status != 403);
  }
}

TEST_CASE("rate limiter allows a burst then refills") {
  auto t = std::chrono::steady_clock::time_point{};
  RateLimiter limiter(3, [&] { return t; });
  CHECK(limiter.allow("a"));
  CHECK(limiter.allow("a"));
  CHECK(limiter.allow("a"));
  CHECK_FALSE(limiter.allow("a"));
  CHECK(limiter.allow("b"));
  t += std::chrono::seconds(20);
  CHECK(limiter.allow("a"));
  CHECK_FALSE(limiter.allow("a"));
  RateLimiter off(0);
  for (int i = 0; i < 1000; ++i) CHECK(off.allow("a"));
}

TEST_CASE("service rate limits per client but never health") {
  EngineConfig cfg = test_engine_config();
  cfg.rate_limit_per_minute = 2;
  Engine engine(cfg);
  Service service(engine);
  CHECK(service.handle(post("/api/verify", {{"value", "https://bank.example/"}})).status == 200);
  CHECK(service.handle(post("/api/verify", {{"value", "https://bank.example/"}})).status == 200);
  const auto limited = service.handle(post("/api/verify", {{"value", "https://bank.example/"}}));
  CHECK(limited.status == 429);
  CHECK(limited.body["payload"]["code"] == "RateLimited");
  CHECK(service.handle(post("/api/verify", {{"value", "https://bank.example/"}}, "198.51.100.40")).status == 200);
  HttpRequest health;
  health.method = "GET";
  health.path = "/api/health";
  health.remote_addr = "198.51.100.10";
  CHECK(service.handle(health).status == 200);
}

TEST_CASE("malformed report entities are 422") {
  Engine engine(test_engine_config());
  Service service(engine);
  for (const json& body : {json{{"value", "   "}}, json{{"value", "no scheme"}, {"kind", "url"}},
                           json{{"value", "x"}, {"kind", "pigeon"}}}) {
    CAPTURE(body.dump());
    const auto res = service.handle(post("/api/report", body));
    CHECK(res.status == 422);
    CHECK(res.body["payload"]["code"] == "MalformedEntity");
  }
}

TEST_CASE("responses carry CORS headers") {
  Engine engine(test_engine_config());
  Service service(engine);
  const auto res = service.handle(post("/api/verify", {{"value", "https://bank.example/"}}));
  bool origin = false;
  for (const auto& [k, v] : res.headers) origin |= k == "Access-Control-Allow-Origin" && v == "*";
  CHECK(origin);
}

TEST_CASE("http listener serves the same responses") {
  Engine engine(test_engine_config());
  Service service(engine);
  const int port = service.bind_any_port("127.0.0.1");
  std::thread server([&] { service.listen_after_bind(); });
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(10, 0);
  auto health = client.Get("/api/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(json::parse(health->body)["payload"]["ok"] == true);

  auto verify = client.Post("/api/verify", R"({"value": "https://phish.example/login"})", "application/json");
  REQUIRE(verify);
  CHECK(verify->status == 200);
  CHECK(json::parse(verify->body)["payload"]["label"] == "malicious");
  CHECK(verify->get_header_value("Access-Control-Allow-Origin") == "*");

  auto missing = client.Get("/nowhere");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto preflight = client.Options("/api/chat");
  REQUIRE(preflight);
  CHECK(preflight->status == 204);

  service.stop();
  server.join();
}

TEST_CASE("verify latency over 200 calls") {
  Engine engine(test_engine_config());
  Service service(engine);
  std::vector<double> elapsed;
  for (int i = 0; i < 200; ++i) {
    const auto res = service.handle(post("/api/verify", {{"value", i % 2 ? "https://bank.example/" : "+242061234567"}}));
    REQUIRE(res.status == 200);
    elapsed.push_back(res.body["elapsed_ms"].get<double>());
  }
  const auto p = percentiles(elapsed);
  MESSAGE("verify latency ms p50=" << p.p50 << " p90=" << p.p90 << " p99=" << p.p99);
  CHECK(p.p99 < 1500);
}
