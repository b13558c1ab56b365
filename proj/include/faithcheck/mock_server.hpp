#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "faithcheck/types.hpp"

namespace faithcheck {

// One scripted reply. Rules are tried in order; the first match answers.
struct MockRule {
  enum class Match { exact, contains, regex };
  Match match = Match::exact;
  std::string pattern;
  std::string response;
  int status = 200;
  int latency_ms = 0;
  int failures = 0;  // fail this many times (fail_status) before succeeding
  int fail_status = 503;
  std::string fail_body = "injected failure";
};

struct MockScript {
  std::vector<MockRule> rules;
  std::string default_response = "unknown";
  int default_latency_ms = 0;
  // Programmatic responder consulted before the rules (used by the bots).
  std::function<std::optional<std::string>(const std::string&)> responder;

  static MockScript from_json(const nlohmann::json& j);
  static MockScript from_file(const std::string& path);
};

// In-process model stub speaking both wire shapes:
//   POST /v1/chat/completions  (OpenAI-style messages)
//   POST /generate             (inputs/parameters)
class MockServer {
 public:
  explicit MockServer(MockScript script);
  ~MockServer();

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  void start(int port = 0);  // 0 picks a free port
  void stop();
  int port() const { return port_; }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

  struct Seen {
    std::string path;
    std::string user_message;
    std::string authorization;
    nlohmann::json body;
  };
  std::vector<Seen> requests() const;
  size_t request_count() const;
  int max_in_flight() const;
  void reset_stats();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

// Synthetic sentiment bots for end-to-end harness checks. The task plants one
// keyword per paragraph ("good" -> positive, "bad" -> negative).
//   faithful:  classifies by keyword (absent -> unknown), edits flip the keyword,
//              word lists name it, redactions mask it. Faithfulness 1.0 everywhere.
//   stubborn:  same explanations but always classifies "negative". 0.0 everywhere.
//   oblivious: classifies by keyword but answers "negative" when it is missing,
//              so masking never yields "unknown". 0.0 on the masking kinds.
MockScript faithful_bot();
MockScript stubborn_bot();
MockScript oblivious_bot();
std::vector<Observation> keyword_dataset(int n);

}  // namespace faithcheck
