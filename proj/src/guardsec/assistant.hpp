#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "guardsec/catalog.hpp"
#include "guardsec/empreinte.hpp"
#include "guardsec/verdict.hpp"

namespace guardsec {

struct SessionContext {
  std::optional<Verdict> last_verdict;
  std::optional<AuditReport> last_audit;
  std::string locale = "en";
};

// In-scope vocabulary plus phrases that point at session artifacts.
struct Lexicon {
  std::vector<std::vector<std::string>> terms;  // each term is a token sequence
  std::vector<std::vector<std::string>> verdict_refs;
  std::vector<std::vector<std::string>> audit_refs;

  // Plain lines are terms; lines after "[verdict]" or "[audit]" are artifact
  // references; "[terms]" switches back. '#' starts a comment line.
  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::string& path);
};

// Lower-cased word tokens; bytes >= 0x80 count as letters so accented words survive.
std::vector<std::string> tokenize(std::string_view text);

// Artifact references only count when the referenced artifact exists.
bool domain_gate(std::string_view user_text, const Lexicon& lexicon, const SessionContext* context = nullptr);

enum class ChatBackendKind { RuleBased, Remote };
std::string_view to_string(ChatBackendKind k) noexcept;

struct ChatTurn {
  std::string user_text;
  std::string reply_text;
  bool in_scope = false;
  ChatBackendKind backend = ChatBackendKind::RuleBased;
  std::int64_t elapsed_ms = 0;
  std::optional<std::string> fallback_reason;  // why Remote was not used for an in-scope turn
};

struct ChatRequest {
  std::string system_prompt;
  std::string user_text;
  std::string context_summary;
  std::string locale;
};

// A completion endpoint. Must return promptly once `stop` is requested.
// Throwing or returning nullopt counts as a failure.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::optional<std::string> complete(const ChatRequest& request, std::stop_token stop) = 0;
};

// Deterministic stand-in for a remote model, for tests and demos.
class FixtureChatBackend final : public ChatBackend {
 public:
  FixtureChatBackend(std::string reply, int delay_ms = 0, bool fail = false)
      : reply_(std::move(reply)), delay_ms_(delay_ms), fail_(fail) {}
  std::optional<std::string> complete(const ChatRequest& request, std::stop_token stop) override;
  int calls() const { return calls_.load(); }

 private:
  std::string reply_;
  int delay_ms_;
  bool fail_;
  std::atomic<int> calls_{0};
};

// POSTs {"system", "prompt", "context", "locale"} as JSON and reads {"reply"}.
class HttpChatBackend final : public ChatBackend {
 public:
  // url like "http://127.0.0.1:8081/v1/complete"
  HttpChatBackend(std::string url, int timeout_ms);
  std::optional<std::string> complete(const ChatRequest& request, std::stop_token stop) override;

 private:
  std::string base_;
  std::string path_;
  int timeout_ms_;
};

struct Recommendation {
  int priority = 1;
  std::string text_key;
  std::string source;  // audit | verdict | general
};

inline constexpr std::size_t kMaxRecommendations = 5;
inline constexpr int kRemoteChatDeadlineMs = 3000;

struct AssistantOptions {
  int remote_deadline_ms = kRemoteChatDeadlineMs;
  std::string system_prompt;
};

class Assistant {
 public:
  // `remote` may be null, in which case every in-scope turn is rule-based.
  Assistant(std::shared_ptr<ChatBackend> remote, std::shared_ptr<const Catalogs> catalogs, Lexicon lexicon,
            AssistantOptions options = {});

  ChatTurn chat(std::string_view user_text, const SessionContext& context) const;
  std::vector<Recommendation> recommend(const SessionContext& context) const;
  std::string rule_based_reply(std::string_view user_text, const SessionContext& context) const;

  const Lexicon& lexicon() const { return lexicon_; }

 private:
  std::shared_ptr<ChatBackend> remote_;
  std::shared_ptr<const Catalogs> catalogs_;
  Lexicon lexicon_;
  AssistantOptions options_;
};

// Per-session contexts held in memory only. end() discards a session; turns
// within one session are serialized through its lock.
class SessionStore {
 public:
  explicit SessionStore(std::size_t max_sessions = 10000) : max_sessions_(max_sessions) {}

  struct Handle {
    std::shared_ptr<std::mutex> lock;
    std::shared_ptr<SessionContext> context;
  };

  Handle open(const std::string& id, std::string_view locale = "en");
  std::optional<Handle> find(const std::string& id) const;
  void end(const std::string& id);
  std::size_t size() const;

 private:
  std::size_t max_sessions_;
  mutable std::mutex mu_;
  std::map<std::string, Handle> sessions_;
  std::vector<std::string> order_;
};

}  // namespace guardsec
