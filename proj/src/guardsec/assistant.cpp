#include "guardsec/assistant.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <sstream>
#include <thread>

#include "guardsec/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace guardsec {

namespace {

using SteadyClock = std::chrono::steady_clock;

bool contains_sequence(const std::vector<std::string>& tokens, const std::vector<std::string>& seq) {
  if (seq.empty() || seq.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + seq.size() <= tokens.size(); ++i) {
    if (std::equal(seq.begin(), seq.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) return true;
  }
  return false;
}

bool any_of(const std::vector<std::string>& tokens, const std::vector<std::vector<std::string>>& seqs) {
  return std::any_of(seqs.begin(), seqs.end(), [&](const auto& s) { return contains_sequence(tokens, s); });
}

struct Topic {
  std::vector<std::vector<std::string>> cues;
  const char* key;
};

// Checked in order; the first topic with a cue in the question wins.
const std::vector<Topic>& topics() {
  static const std::vector<Topic> t = {
      {{{"dns", "leak"}, {"fuite", "dns"}}, "chat.topic.dns_leak"},
      {{{"phishing"}, {"hameçonnage"}, {"hameconnage"}}, "chat.topic.phishing"},
      {{{"sim", "swap"}}, "chat.topic.sim_swap"},
      {{{"mobile", "money"}, {"momo"}}, "chat.topic.mobile_money"},
      {{{"password"}, {"passwords"}, {"mot", "de", "passe"}, {"2fa"}}, "chat.topic.password"},
      {{{"tor"}}, "chat.topic.tor"},
      {{{"vpn"}, {"proxy"}}, "chat.topic.vpn"},
      {{{"malware"}, {"virus"}, {"ransomware"}, {"logiciel", "malveillant"}}, "chat.topic.malware"},
      {{{"report"}, {"signaler"}, {"signalement"}}, "chat.topic.report"},
      {{{"scam"}, {"scams"}, {"fraud"}, {"arnaque"}, {"escroquerie"}, {"fraude"}}, "chat.topic.scam"},
  };
  return t;
}

const std::vector<std::vector<std::string>>& verdict_cues() {
  static const std::vector<std::vector<std::string>> c = {{"verdict"}, {"result"}, {"score"}, {"résultat"},
                                                           {"resultat"}};
  return c;
}

std::string context_summary(const SessionContext& ctx) {
  std::ostringstream s;
  if (ctx.last_verdict) {
    const auto& v = *ctx.last_verdict;
    s << "last verdict: " << to_string(v.entity.kind) << " " << to_string(v.label) << " score "
      << display_score(v.score) << "/100";
    if (!v.dominant_features.empty()) s << ", top feature " << to_string(v.dominant_features.front().feature);
    s << ". ";
  }
  if (ctx.last_audit) {
    s << "last audit warnings:";
    bool any = false;
    for (const auto& i : ctx.last_audit->indicators) {
      if (i.triggered && i.severity != Severity::Info) {
        s << " " << indicator_id(i.indicator);
        any = true;
      }
    }
    if (!any) s << " none";
    s << ".";
  }
  return s.str();
}

struct RemoteCall {
  std::mutex m;
  std::condition_variable cv;
  bool done = false;
  std::optional<std::string> reply;
  std::string error;
  std::stop_source stop;
};

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Lexicon Lexicon::parse(std::string_view text) {
  Lexicon lex;
  auto* target = &lex.terms;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string trimmed = line.substr(b, e - b + 1);
    if (trimmed == "[terms]") {
      target = &lex.terms;
    } else if (trimmed == "[verdict]") {
      target = &lex.verdict_refs;
    } else if (trimmed == "[audit]") {
      target = &lex.audit_refs;
    } else if (trimmed.front() == '[') {
      throw Error(ErrorCode::ParseError, "unknown lexicon section " + trimmed);
    } else {
      auto tokens = tokenize(trimmed);
      if (!tokens.empty()) target->push_back(std::move(tokens));
    }
  }
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open lexicon '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool domain_gate(std::string_view user_text, const Lexicon& lexicon, const SessionContext* context) {
  const auto tokens = tokenize(user_text);
  if (any_of(tokens, lexicon.terms)) return true;
  if (context == nullptr) return false;
  if (context->last_verdict && any_of(tokens, lexicon.verdict_refs)) return true;
  if (context->last_audit && any_of(tokens, lexicon.audit_refs)) return true;
  return false;
}

std::string_view to_string(ChatBackendKind k) noexcept {
  return k == ChatBackendKind::Remote ? "remote" : "rule_based";
}

std::optional<std::string> FixtureChatBackend::complete(const ChatRequest&, std::stop_token stop) {
  ++calls_;
  if (fail_) return std::nullopt;
  if (delay_ms_ > 0) {
    std::mutex m;
    std::condition_variable_any cv;
    std::unique_lock lock(m);
    if (cv.wait_for(lock, stop, std::chrono::milliseconds(delay_ms_), [] { return false; }) ||
        stop.stop_requested()) {
      return std::nullopt;
    }
  }
  return reply_;
}

HttpChatBackend::HttpChatBackend(std::string url, int timeout_ms) : timeout_ms_(timeout_ms) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorCode::InvalidArgument, "chat backend url needs a scheme");
  const auto slash = url.find('/', scheme + 3);
  base_ = slash == std::string::npos ? url : url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

std::optional<std::string> HttpChatBackend::complete(const ChatRequest& request, std::stop_token) {
  httplib::Client client(base_);
  const auto sec = timeout_ms_ / 1000;
  const auto usec = (timeout_ms_ % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  const nlohmann::json body = {{"system", request.system_prompt},
                               {"prompt", request.user_text},
                               {"context", request.context_summary},
                               {"locale", request.locale}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res || res->status != 200) return std::nullopt;
  const auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.contains("reply") || !j["reply"].is_string()) return std::nullopt;
  return j["reply"].get<std::string>();
}

Assistant::Assistant(std::shared_ptr<ChatBackend> remote, std::shared_ptr<const Catalogs> catalogs, Lexicon lexicon,
                     AssistantOptions options)
    : remote_(std::move(remote)),
      catalogs_(std::move(catalogs)),
      lexicon_(std::move(lexicon)),
      options_(std::move(options)) {
  if (!catalogs_) throw Error(ErrorCode::InvalidArgument, "catalogs are required");
  if (options_.remote_deadline_ms <= 0) throw Error(ErrorCode::InvalidArgument, "remote deadline must be positive");
}

std::string Assistant::rule_based_reply(std::string_view user_text, const SessionContext& ctx) const {
  const Catalogs& cat = *catalogs_;
  const std::string locale = cat.has_locale(ctx.locale) ? ctx.locale : cat.default_locale();
  const auto tokens = tokenize(user_text);

  if (ctx.last_verdict && (any_of(tokens, lexicon_.verdict_refs) || any_of(tokens, verdict_cues()))) {
    const auto& v = *ctx.last_verdict;
    std::map<std::string, std::string> args{
        {"kind", cat.text(locale, "kind." + std::string(to_string(v.entity.kind)))},
        {"label", cat.text(locale, "label." + std::string(to_string(v.label)))},
        {"score", std::to_string(display_score(v.score))},
    };
    if (v.dominant_features.empty()) return cat.text(locale, "chat.verdict.no_feature", args);
    args["feature"] = cat.text(locale, "feature." + std::string(to_string(v.dominant_features.front().feature)));
    return cat.text(locale, "chat.verdict", args);
  }
  if (ctx.last_audit && any_of(tokens, lexicon_.audit_refs)) {
    std::string warnings;
    for (const auto& i : ctx.last_audit->indicators) {
      if (!i.triggered || i.severity == Severity::Info) continue;
      if (!warnings.empty()) warnings += ", ";
      warnings += cat.text(locale, "indicator." + std::string(indicator_id(i.indicator)));
    }
    if (warnings.empty()) return cat.text(locale, "chat.audit.clean");
    return cat.text(locale, "chat.audit", {{"warnings", warnings}});
  }
  for (const auto& t : topics()) {
    if (any_of(tokens, t.cues)) return cat.text(locale, t.key);
  }
  return cat.text(locale, "chat.generic");
}

ChatTurn Assistant::chat(std::string_view user_text, const SessionContext& ctx) const {
  const auto t0 = SteadyClock::now();
  ChatTurn turn;
  turn.user_text = std::string(user_text);
  turn.in_scope = domain_gate(user_text, lexicon_, &ctx);
  const std::string locale = catalogs_->has_locale(ctx.locale) ? ctx.locale : catalogs_->default_locale();
  auto finish = [&] {
    turn.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(SteadyClock::now() - t0).count();
    return turn;
  };
  if (!turn.in_scope) {
    turn.backend = ChatBackendKind::RuleBased;
    turn.reply_text = catalogs_->text(locale, "chat.redirect");
    return finish();
  }
  if (remote_) {
    auto call = std::make_shared<RemoteCall>();
    ChatRequest req{options_.system_prompt, std::string(user_text), context_summary(ctx), locale};
    std::thread([call, backend = remote_, req = std::move(req)] {
      std::optional<std::string> reply;
      std::string error;
      try {
        reply = backend->complete(req, call->stop.get_token());
      } catch (const std::exception& e) {
        error = e.what();
      }
      {
        std::lock_guard lock(call->m);
        call->reply = std::move(reply);
        call->error = std::move(error);
        call->done = true;
      }
      call->cv.notify_all();
    }).detach();
    std::unique_lock lock(call->m);
    const bool finished = call->cv.wait_until(lock, t0 + std::chrono::milliseconds(options_.remote_deadline_ms),
                                              [&] { return call->done; });
    if (finished && call->reply && !call->reply->empty()) {
      turn.backend = ChatBackendKind::Remote;
      turn.reply_text = *call->reply;
      return finish();
    }
    turn.fallback_reason = !finished ? "timed_out" : "failed";
    lock.unlock();
    call->stop.request_stop();
  }
  turn.backend = ChatBackendKind::RuleBased;
  turn.reply_text = rule_based_reply(user_text, ctx);
  return finish();
}

std::vector<Recommendation> Assistant::recommend(const SessionContext& ctx) const {
  std::vector<std::pair<std::string, std::string>> items;  // key, source
  if (ctx.last_audit) {
    const auto& a = *ctx.last_audit;
    if (a.indicator(Indicator::DnsLeak).triggered) items.emplace_back("rec.dns_leak", "audit");
    if (a.indicator(Indicator::Hosting).triggered) items.emplace_back("rec.hosting", "audit");
  }
  if (ctx.last_verdict && ctx.last_verdict->label == Label::Malicious) {
    items.emplace_back("rec.do_not_engage", "verdict");
    static const std::map<EntityKind, std::string> report_keys = {
        {EntityKind::Url, "rec.report_link"},     {EntityKind::Domain, "rec.report_domain"},
        {EntityKind::Email, "rec.report_email"},  {EntityKind::Phone, "rec.report_number"},
        {EntityKind::Business, "rec.report_business"},
    };
    items.emplace_back(report_keys.at(ctx.last_verdict->entity.kind), "verdict");
  }
  if (ctx.last_audit && ctx.last_audit->indicator(Indicator::TorExit).triggered) {
    items.emplace_back("rec.tor", "audit");
  }
  if (items.empty()) {
    for (const char* key : {"rec.general.verify_links", "rec.general.passwords", "rec.general.updates",
                            "rec.general.mobile_money_pin"}) {
      items.emplace_back(key, "general");
    }
  }
  std::vector<Recommendation> out;
  for (std::size_t i = 0; i < items.size() && i < kMaxRecommendations; ++i) {
    out.push_back({static_cast<int>(i + 1), items[i].first, items[i].second});
  }
  return out;
}

SessionStore::Handle SessionStore::open(const std::string& id, std::string_view locale) {
  std::lock_guard lock(mu_);
  if (const auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  if (sessions_.size() >= max_sessions_ && !order_.empty()) {
    sessions_.erase(order_.front());
    order_.erase(order_.begin());
  }
  Handle h{std::make_shared<std::mutex>(), std::make_shared<SessionContext>()};
  h.context->locale = std::string(locale);
  sessions_[id] = h;
  order_.push_back(id);
  return h;
}

std::optional<SessionStore::Handle> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

void SessionStore::end(const std::string& id) {
  std::lock_guard lock(mu_);
  sessions_.erase(id);
  order_.erase(std::remove(order_.begin(), order_.end(), id), order_.end());
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace guardsec
