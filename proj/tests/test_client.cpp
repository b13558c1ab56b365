#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "faithcheck/client.hpp"
#include "faithcheck/mock_server.hpp"

using namespace faithcheck;

namespace {

const RetryPolicy kFastRetry{3, std::chrono::milliseconds(5), 2.0};

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("faithcheck-test-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

MockScript echo_script() {
  MockScript s;
  s.responder = [](const std::string& user) { return user; };
  return s;
}

ModelProfile profile_for(const MockServer& server) {
  ModelProfile p;
  p.endpoint = server.endpoint();
  p.model_name = "test-model";
  return p;
}

ChatRequest req(const std::string& msg) {
  ChatRequest r;
  r.user_message = msg;
  return r;
}

}  // namespace

TEST_CASE("cache_key: sensitive to every request field, nothing else") {
  ModelProfile p;
  p.endpoint = "http://a";
  p.model_name = "m";
  ChatRequest r = req("hello");
  const auto base = cache_key(p, r);

  CHECK(cache_key(p, r) == base);

  auto changed = [&](auto mutate) {
    ModelProfile p2 = p;
    ChatRequest r2 = r;
    mutate(p2, r2);
    return cache_key(p2, r2) != base;
  };
  CHECK(changed([](ModelProfile& p2, ChatRequest&) { p2.model_name = "other"; }));
  CHECK(changed([](ModelProfile& p2, ChatRequest&) { p2.system_prompt = "sys"; }));
  CHECK(changed([](ModelProfile&, ChatRequest& r2) { r2.user_message = "bye"; }));
  CHECK(changed([](ModelProfile&, ChatRequest& r2) { r2.params.temperature = 0.2; }));
  CHECK(changed([](ModelProfile&, ChatRequest& r2) { r2.params.top_p = 0.5; }));
  CHECK(changed([](ModelProfile&, ChatRequest& r2) { r2.params.top_k = 5; }));
  CHECK(changed([](ModelProfile&, ChatRequest& r2) { r2.params.repetition_penalty = 1.0; }));
  CHECK(changed([](ModelProfile&, ChatRequest& r2) { r2.params.seed = 1; }));
  CHECK(changed([](ModelProfile&, ChatRequest& r2) { r2.params.max_new_tokens = 2; }));

  // transport details do not move the key
  CHECK_FALSE(changed([](ModelProfile& p2, ChatRequest&) { p2.endpoint = "http://b"; }));
  CHECK_FALSE(changed([](ModelProfile& p2, ChatRequest&) { p2.protocol = WireProtocol::raw_generate; }));
  CHECK_FALSE(changed([](ModelProfile& p2, ChatRequest&) { p2.api_key = "k"; }));

  // an empty system prompt is distinct from an absent one
  ModelProfile with_empty = p;
  with_empty.system_prompt = "";
  CHECK(cache_key(with_empty, r) != base);
}

TEST_CASE("response cache: round-trip, cold miss, corrupt entry") {
  TempDir tmp;
  ResponseCache cache(tmp.path);
  const std::string key(64, 'a');
  CHECK_FALSE(cache.get(key).has_value());

  const std::string payload = "line one\nline two \xF0\x9F\x98\x80 end";
  cache.put(key, {{"echo", true}}, payload);
  auto got = cache.get(key);
  REQUIRE(got.has_value());
  CHECK(*got == payload);

  // survives a fresh handle (persistent across processes)
  ResponseCache again(tmp.path);
  CHECK(again.get(key).value() == payload);

  // corrupt the file on disk: dropped and treated as a miss
  std::ofstream(tmp.path / key.substr(0, 2) / (key + ".json")) << "{broken";
  CHECK_FALSE(cache.get(key).has_value());
  CHECK_FALSE(std::filesystem::exists(tmp.path / key.substr(0, 2) / (key + ".json")));
}

TEST_CASE("response cache: concurrent writers of one key do not corrupt it") {
  TempDir tmp;
  ResponseCache cache(tmp.path);
  const std::string key(64, 'b');
  const std::string payload = "stable response";
  std::vector<std::thread> writers;
  for (int i = 0; i < 8; ++i)
    writers.emplace_back([&] {
      for (int k = 0; k < 20; ++k) cache.put(key, nullptr, payload);
    });
  for (auto& t : writers) t.join();
  CHECK(cache.get(key).value() == payload);
}

TEST_CASE("complete: round-trip, then served from cache") {
  MockServer server(echo_script());
  server.start();
  TempDir tmp;
  ResponseCache cache(tmp.path);
  InferenceClient client(profile_for(server), kFastRetry, &cache);

  auto first = client.complete(req("ping"));
  REQUIRE(first.ok);
  CHECK(first.response == "ping");
  CHECK_FALSE(first.cached);
  CHECK(server.request_count() == 1);

  auto second = client.complete(req("ping"));
  REQUIRE(second.ok);
  CHECK(second.response == "ping");
  CHECK(second.cached);
  CHECK(second.cache_key == first.cache_key);
  CHECK(server.request_count() == 1);

  // a second client over the same directory sees the entry too
  InferenceClient other(profile_for(server), kFastRetry, &cache);
  CHECK(other.complete(req("ping")).cached);
  server.stop();
}

TEST_CASE("complete: retries a transient 503 and then succeeds") {
  MockScript script;
  MockRule rule;
  rule.pattern = "flaky";
  rule.response = "recovered";
  rule.failures = 1;
  script.rules.push_back(rule);
  MockServer server(std::move(script));
  server.start();

  InferenceClient client(profile_for(server), kFastRetry, nullptr);
  auto ex = client.complete(req("flaky"));
  CHECK(ex.ok);
  CHECK(ex.response == "recovered");
  CHECK(server.request_count() == 2);
  server.stop();
}

TEST_CASE("complete: gives up after max_attempts on persistent 5xx") {
  MockScript script;
  MockRule rule;
  rule.pattern = "down";
  rule.failures = 1000;
  script.rules.push_back(rule);
  MockServer server(std::move(script));
  server.start();

  InferenceClient client(profile_for(server), kFastRetry, nullptr);
  auto ex = client.complete(req("down"));
  CHECK_FALSE(ex.ok);
  CHECK(ex.error.find("503") != std::string::npos);
  CHECK(server.request_count() == 3);  // max_attempts
  server.stop();
}

TEST_CASE("complete: a 4xx is surfaced immediately, no retry") {
  MockScript script;
  MockRule rule;
  rule.pattern = "bad";
  rule.status = 400;
  rule.response = "no such model";
  script.rules.push_back(rule);
  MockServer server(std::move(script));
  server.start();

  InferenceClient client(profile_for(server), kFastRetry, nullptr);
  auto ex = client.complete(req("bad"));
  CHECK_FALSE(ex.ok);
  CHECK(ex.error.find("HTTP 400") != std::string::npos);
  CHECK(ex.error.find("no such model") != std::string::npos);
  CHECK(server.request_count() == 1);
  server.stop();
}

TEST_CASE("complete: malformed 200 body is surfaced with an excerpt") {
  MockScript script;
  MockRule rule;
  rule.pattern = "weird";
  rule.failures = 1;
  rule.fail_status = 200;  // "succeeds" with a body the client cannot read
  rule.fail_body = "<html>surprise</html>";
  script.rules.push_back(rule);
  MockServer server(std::move(script));
  server.start();

  InferenceClient client(profile_for(server), kFastRetry, nullptr);
  auto ex = client.complete(req("weird"));
  CHECK_FALSE(ex.ok);
  CHECK(ex.error.find("unexpected response body") != std::string::npos);
  CHECK(ex.error.find("surprise") != std::string::npos);
  CHECK(server.request_count() == 1);
  server.stop();
}

TEST_CASE("complete: unreachable endpoint reports a transport error") {
  ModelProfile p;
  p.endpoint = "http://127.0.0.1:9";  // discard port, nothing listens
  p.model_name = "m";
  p.connect_timeout_s = 1;
  InferenceClient client(p, RetryPolicy{2, std::chrono::milliseconds(1), 2.0}, nullptr);
  auto ex = client.complete(req("hello"));
  CHECK_FALSE(ex.ok);
  CHECK(ex.error.find("transport error") != std::string::npos);
}

TEST_CASE("wire: chat-completions body carries the generation parameters") {
  MockServer server(echo_script());
  server.start();
  ModelProfile p = profile_for(server);
  p.system_prompt = "be terse";
  p.api_key = "secret-token";
  InferenceClient client(p, kFastRetry, nullptr);

  ChatRequest r = req("check the wire");
  r.params.temperature = 0.7;
  r.params.seed = 42;
  auto ex = client.complete(r);
  REQUIRE(ex.ok);

  auto seen = server.requests();
  REQUIRE(seen.size() == 1);
  CHECK(seen[0].path == "/v1/chat/completions");
  CHECK(seen[0].authorization == "Bearer secret-token");
  const auto& body = seen[0].body;
  CHECK(body.at("model") == "test-model");
  CHECK(body.at("temperature").get<double>() == doctest::Approx(0.7));
  CHECK(body.at("top_p").get<double>() == doctest::Approx(0.95));
  CHECK(body.at("top_k").get<int>() == 50);
  CHECK(body.at("repetition_penalty").get<double>() == doctest::Approx(1.2));
  CHECK(body.at("seed").get<int>() == 42);
  CHECK(body.at("max_tokens").get<int>() == 1024);
  REQUIRE(body.at("messages").size() == 2);
  CHECK(body.at("messages")[0].at("role") == "system");
  CHECK(body.at("messages")[0].at("content") == "be terse");
  CHECK(body.at("messages")[1].at("role") == "user");
  CHECK(body.at("messages")[1].at("content") == "check the wire");
  server.stop();
}

TEST_CASE("wire: raw-generate body nests parameters and prepends the system prompt") {
  MockServer server(echo_script());
  server.start();
  ModelProfile p = profile_for(server);
  p.protocol = WireProtocol::raw_generate;
  p.system_prompt = "You are concise.";
  InferenceClient client(p, kFastRetry, nullptr);

  auto ex = client.complete(req("raw question"));
  REQUIRE(ex.ok);
  CHECK(ex.response == "You are concise.\n\nraw question");

  auto seen = server.requests();
  REQUIRE(seen.size() == 1);
  CHECK(seen[0].path == "/generate");
  const auto& body = seen[0].body;
  CHECK(body.at("inputs") == "You are concise.\n\nraw question");
  const auto& params = body.at("parameters");
  CHECK(params.at("max_new_tokens").get<int>() == 1024);
  CHECK(params.at("do_sample").get<bool>());
  CHECK(params.at("temperature").get<double>() == doctest::Approx(0.1));
  server.stop();
}

TEST_CASE("run_batch: preserves input order under jittered latencies") {
  MockScript script = echo_script();
  MockServer server(std::move(script));
  server.start();
  InferenceClient client(profile_for(server), kFastRetry, nullptr);

  std::vector<ChatRequest> requests;
  std::mt19937 rng(7);
  for (int i = 0; i < 24; ++i) {
    ChatRequest r = req("message-" + std::to_string(i));
    requests.push_back(r);
  }
  // jitter via per-request latency rules would serialize on the mutex; instead
  // rely on thread scheduling across 8 workers to shuffle completion order
  auto results = client.run_batch(requests, 8);
  REQUIRE(results.size() == requests.size());
  for (size_t i = 0; i < results.size(); ++i) {
    REQUIRE(results[i].ok);
    CHECK(results[i].response == requests[i].user_message);
    CHECK(results[i].request.user_message == requests[i].user_message);
  }
  server.stop();
}

TEST_CASE("run_batch: identical requests collapse into one network call") {
  MockServer server(echo_script());
  server.start();
  TempDir tmp;
  ResponseCache cache(tmp.path);
  InferenceClient client(profile_for(server), kFastRetry, &cache);

  std::vector<ChatRequest> requests(100, req("same thing"));
  auto results = client.run_batch(requests, 50);
  CHECK(server.request_count() == 1);
  for (const auto& ex : results) {
    CHECK(ex.ok);
    CHECK(ex.response == "same thing");
  }

  // warm cache: a re-run of the whole batch touches the network zero times
  server.reset_stats();
  auto rerun = client.run_batch(requests, 50);
  CHECK(server.request_count() == 0);
  for (const auto& ex : rerun) CHECK(ex.cached);
  server.stop();
}

TEST_CASE("run_batch: one poisoned request does not sink the batch") {
  MockScript script;
  MockRule rule;
  rule.match = MockRule::Match::exact;
  rule.pattern = "poison";
  rule.status = 400;
  rule.response = "rejected";
  script.rules.push_back(rule);
  script.default_response = "fine";
  MockServer server(std::move(script));
  server.start();
  InferenceClient client(profile_for(server), kFastRetry, nullptr);

  std::vector<ChatRequest> requests;
  for (int i = 0; i < 10; ++i)
    requests.push_back(req(i == 3 ? "poison" : "query-" + std::to_string(i)));
  auto results = client.run_batch(requests, 4);
  REQUIRE(results.size() == 10);
  for (size_t i = 0; i < results.size(); ++i) {
    if (i == 3) {
      CHECK_FALSE(results[i].ok);
      CHECK(results[i].error.find("HTTP 400") != std::string::npos);
    } else {
      CHECK(results[i].ok);
      CHECK(results[i].response == "fine");
    }
  }
  server.stop();
}

TEST_CASE("run_batch: parallelism=1 is strictly sequential") {
  MockScript script = echo_script();
  script.default_latency_ms = 3;
  MockServer server(std::move(script));
  server.start();
  InferenceClient client(profile_for(server), kFastRetry, nullptr);

  std::vector<ChatRequest> requests;
  for (int i = 0; i < 6; ++i) requests.push_back(req("seq-" + std::to_string(i)));
  client.run_batch(requests, 1);
  CHECK(server.max_in_flight() == 1);
  server.stop();
}

TEST_CASE("run_batch: in-flight count stays within the parallelism bound") {
  MockScript script = echo_script();
  script.default_latency_ms = 10;
  MockServer server(std::move(script));
  server.start();
  InferenceClient client(profile_for(server), kFastRetry, nullptr);

  std::vector<ChatRequest> requests;
  for (int i = 0; i < 40; ++i) requests.push_back(req("load-" + std::to_string(i)));
  auto results = client.run_batch(requests, 8);
  CHECK(server.max_in_flight() <= 8);
  CHECK(server.max_in_flight() >= 2);  // it did actually run concurrently
  for (const auto& ex : results) CHECK(ex.ok);
  server.stop();
}
