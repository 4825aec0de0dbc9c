#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "guardsec/engine.hpp"
#include "guardsec/error.hpp"
#include "json.hpp"

namespace guardsec {

inline constexpr std::string_view kApiVersion = "1";

struct HttpRequest {
  std::string method;
  std::string path;
  HeaderMap headers;  // lower-case names
  std::map<std::string, std::string> query;
  std::string body;
  std::string remote_addr;
};

struct HttpResponse {
  int status = 200;
  nlohmann::json body;  // null for bodiless responses
  std::vector<std::pair<std::string, std::string>> headers;
};

// Status code for an error surfaced by an endpoint. Never 401 or 403.
int http_status_for(ErrorCode code) noexcept;

// Token bucket per key: `per_minute` burst, refilled continuously.
class RateLimiter {
 public:
  using TimePoint = std::chrono::steady_clock::time_point;
  using Now = std::function<TimePoint()>;

  explicit RateLimiter(int per_minute, Now now = std::chrono::steady_clock::now);
  // False when the key has no token left. Always true when disabled (per_minute == 0).
  bool allow(const std::string& key);

 private:
  struct Bucket {
    double tokens;
    TimePoint last;
  };
  int per_minute_;
  Now now_;
  std::mutex mu_;
  std::unordered_map<std::string, Bucket> buckets_;
};

class Service {
 public:
  explicit Service(Engine& engine);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Transport-independent request handling; the HTTP listener delegates here.
  HttpResponse handle(const HttpRequest& request);

  // Blocks serving until stop(). Throws Error{BindFailure}.
  void listen(const std::string& host, int port);
  // Binds to an ephemeral port and returns it; serve with listen_after_bind().
  int bind_any_port(const std::string& host);
  void listen_after_bind();
  void stop();

 private:
  struct Server;

  HttpResponse verify(const HttpRequest& req, const nlohmann::json& body, const std::string& locale);
  HttpResponse empreinte(const HttpRequest& req, const nlohmann::json& body, const std::string& locale);
  HttpResponse report(const HttpRequest& req, const nlohmann::json& body, const std::string& locale);
  HttpResponse chat(const HttpRequest& req, const nlohmann::json& body, const std::string& locale);
  HttpResponse health();
  HttpResponse error(ErrorCode code, const std::string& detail, const std::string& locale) const;
  std::string client_key(const HttpRequest& req) const;

  Engine& engine_;
  RateLimiter limiter_;
  std::chrono::steady_clock::time_point started_;
  std::unique_ptr<Server> server_;
};

}  // namespace guardsec
