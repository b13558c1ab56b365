#include "faithcheck/mock_server.hpp"

#include <atomic>
#include <fstream>
#include <regex>
#include <stdexcept>
#include <thread>

#include <httplib.h>

namespace faithcheck {

using nlohmann::json;

MockScript MockScript::from_json(const json& j) {
  MockScript script;
  if (j.contains("default_response")) script.default_response = j.at("default_response");
  if (j.contains("default_latency_ms")) script.default_latency_ms = j.at("default_latency_ms");
  for (const auto& e : j.value("entries", json::array())) {
    MockRule rule;
    const std::string match = e.value("match", "exact");
    if (match == "exact")
      rule.match = MockRule::Match::exact;
    else if (match == "contains")
      rule.match = MockRule::Match::contains;
    else if (match == "regex")
      rule.match = MockRule::Match::regex;
    else
      throw std::invalid_argument("mock script: unknown match kind: " + match);
    rule.pattern = e.at("pattern");
    rule.response = e.value("response", script.default_response);
    rule.status = e.value("status", 200);
    rule.latency_ms = e.value("latency_ms", 0);
    rule.failures = e.value("failures", 0);
    rule.fail_status = e.value("fail_status", 503);
    rule.fail_body = e.value("fail_body", std::string("injected failure"));
    script.rules.push_back(std::move(rule));
  }
  return script;
}

MockScript MockScript::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mock script: " + path);
  json j = json::parse(in);
  return from_json(j);
}

struct MockServer::Impl {
  explicit Impl(MockScript s) : script(std::move(s)), remaining(script.rules.size()) {
    for (size_t i = 0; i < script.rules.size(); ++i) remaining[i] = script.rules[i].failures;
  }

  MockScript script;
  httplib::Server server;
  std::thread thread;

  mutable std::mutex mu;
  std::vector<Seen> seen;
  std::vector<int> remaining;  // per-rule failure countdown
  std::atomic<int> in_flight{0};
  std::atomic<int> high_water{0};
  std::atomic<size_t> hits{0};

  struct Reply {
    int status;
    std::string body_text;
    int latency_ms;
    bool is_error;
  };

  Reply decide(const std::string& user_message) {
    if (script.responder) {
      if (auto r = script.responder(user_message))
        return {200, *r, script.default_latency_ms, false};
    }
    std::lock_guard<std::mutex> lock(mu);
    for (size_t i = 0; i < script.rules.size(); ++i) {
      const auto& rule = script.rules[i];
      bool hit = false;
      switch (rule.match) {
        case MockRule::Match::exact: hit = user_message == rule.pattern; break;
        case MockRule::Match::contains:
          hit = user_message.find(rule.pattern) != std::string::npos;
          break;
        case MockRule::Match::regex:
          hit = std::regex_search(user_message, std::regex(rule.pattern));
          break;
      }
      if (!hit) continue;
      if (remaining[i] > 0) {
        --remaining[i];
        return {rule.fail_status, rule.fail_body, rule.latency_ms, true};
      }
      return {rule.status, rule.response, rule.latency_ms, rule.status >= 400};
    }
    return {200, script.default_response, script.default_latency_ms, false};
  }

  void handle(const httplib::Request& req, httplib::Response& res, bool chat_shape) {
    int now = in_flight.fetch_add(1) + 1;
    int prev = high_water.load();
    while (now > prev && !high_water.compare_exchange_weak(prev, now)) {
    }
    hits.fetch_add(1);

    json body = json::parse(req.body, nullptr, false);
    std::string user;
    if (!body.is_discarded()) {
      if (chat_shape && body.contains("messages")) {
        for (const auto& m : body["messages"]) {
          if (m.value("role", "") == "user") user = m.value("content", "");
        }
      } else if (body.contains("inputs")) {
        user = body["inputs"].get<std::string>();
      }
    }
    {
      std::lock_guard<std::mutex> lock(mu);
      seen.push_back({req.path, user, req.get_header_value("Authorization"),
                      body.is_discarded() ? json() : body});
    }

    Reply reply = decide(user);
    if (reply.latency_ms > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(reply.latency_ms));

    if (reply.is_error) {
      res.status = reply.status;
      res.set_content(reply.body_text, "text/plain");
    } else if (chat_shape) {
      json out{{"id", "mock-1"},
               {"object", "chat.completion"},
               {"choices",
                json::array({json{{"index", 0},
                                  {"message", {{"role", "assistant"}, {"content", reply.body_text}}},
                                  {"finish_reason", "stop"}}})}};
      res.status = reply.status;
      res.set_content(out.dump(), "application/json");
    } else {
      res.status = reply.status;
      res.set_content(json{{"generated_text", reply.body_text}}.dump(), "application/json");
    }
    in_flight.fetch_sub(1);
  }
};

MockServer::MockServer(MockScript script) : impl_(std::make_unique<Impl>(std::move(script))) {
  impl_->server.new_task_queue = [] { return new httplib::ThreadPool(128); };
  impl_->server.Post("/v1/chat/completions",
                     [this](const httplib::Request& req, httplib::Response& res) {
                       impl_->handle(req, res, true);
                     });
  impl_->server.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
    impl_->handle(req, res, false);
  });
}

MockServer::~MockServer() { stop(); }

void MockServer::start(int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("mock server: cannot bind a port");
  } else {
    if (!impl_->server.bind_to_port("127.0.0.1", port))
      throw std::runtime_error("mock server: cannot bind port " + std::to_string(port));
    port_ = port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void MockServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
  if (impl_ && impl_->thread.joinable()) impl_->thread.join();
}

std::vector<MockServer::Seen> MockServer::requests() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->seen;
}

size_t MockServer::request_count() const { return impl_->hits.load(); }

int MockServer::max_in_flight() const { return impl_->high_water.load(); }

void MockServer::reset_stats() {
  std::lock_guard<std::mutex> lock(impl_->mu);
  impl_->seen.clear();
  impl_->hits.store(0);
  impl_->high_water.store(0);
}

}  // namespace faithcheck
