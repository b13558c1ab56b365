#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace faithcheck {

struct GenerationParams {
  double temperature = 0.1;
  double top_p = 0.95;
  double repetition_penalty = 1.2;
  int top_k = 50;
  std::int64_t seed = 0;
  int max_new_tokens = 1024;
};

enum class WireProtocol { chat_completions, raw_generate };

std::string to_string(WireProtocol p);
WireProtocol wire_protocol_from_string(const std::string& s);

struct ModelProfile {
  std::string endpoint;  // e.g. http://localhost:8080
  std::string model_name;
  WireProtocol protocol = WireProtocol::chat_completions;
  std::optional<std::string> system_prompt;  // absent for models tuned without one
  std::string api_key;                       // empty -> no Authorization header
  int connect_timeout_s = 10;
  int read_timeout_s = 300;
};

struct ChatRequest {
  std::string user_message;
  GenerationParams params;
};

struct ChatExchange {
  ChatRequest request;
  std::string cache_key;
  std::string response;
  bool ok = false;
  bool cached = false;
  std::string error;  // set when !ok
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{500};
  double multiplier = 2.0;
};

// Stable identity of a request: sha-256 over the canonical serialization of the
// model name, system prompt, user message and every generation parameter.
std::string cache_key(const ModelProfile& profile, const ChatRequest& req);

std::string sha256_hex(const std::string& data);

// One file per key under {dir}/{key[0:2]}/{key}.json, written atomically.
// Corrupt entries are dropped (with a note on stderr) and re-fetched.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);
  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const nlohmann::json& request_echo,
           const std::string& response) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

class InferenceClient {
 public:
  InferenceClient(ModelProfile profile, RetryPolicy retry = {}, ResponseCache* cache = nullptr);

  // Single request: cache lookup, then network with retries, then cache fill.
  ChatExchange complete(const ChatRequest& req);

  // Executes a batch with at most `parallelism` requests in flight. Identical
  // requests are coalesced into one network call; cache hits resolve without
  // occupying a slot. Results are positional: result[i] answers requests[i].
  std::vector<ChatExchange> run_batch(const std::vector<ChatRequest>& requests,
                                      int parallelism = 50);

  const ModelProfile& profile() const { return profile_; }

 private:
  ChatExchange fetch(const ChatRequest& req);  // network + retry, no cache
  nlohmann::json request_body(const ChatRequest& req) const;

  ModelProfile profile_;
  RetryPolicy retry_;
  ResponseCache* cache_;
};

}  // namespace faithcheck
