#include "faithcheck/client.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>
#include <unordered_map>

#include <httplib.h>

namespace faithcheck {
namespace {

using nlohmann::json;

struct Endpoint {
  std::string base;    // scheme://host:port
  std::string prefix;  // optional path prefix, no trailing slash
};

Endpoint parse_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw std::invalid_argument("endpoint must start with http:// or https://: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

std::string excerpt(const std::string& body, size_t limit = 200) {
  std::string out = body.substr(0, limit);
  for (auto& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  if (body.size() > limit) out += "...";
  return out;
}

bool retryable_status(int status) { return status >= 500 || status == 429; }

}  // namespace

std::string to_string(WireProtocol p) {
  switch (p) {
    case WireProtocol::chat_completions: return "chat-completions";
    case WireProtocol::raw_generate: return "raw-generate";
  }
  throw std::logic_error("bad WireProtocol");
}

WireProtocol wire_protocol_from_string(const std::string& s) {
  if (s == "chat-completions") return WireProtocol::chat_completions;
  if (s == "raw-generate") return WireProtocol::raw_generate;
  throw std::invalid_argument("unknown protocol: " + s + " (want chat-completions|raw-generate)");
}

std::string cache_key(const ModelProfile& profile, const ChatRequest& req) {
  const auto& p = req.params;
  json canonical{
      {"model", profile.model_name},
      {"system", profile.system_prompt ? json(*profile.system_prompt) : json()},
      {"user", req.user_message},
      {"temperature", p.temperature},
      {"top_p", p.top_p},
      {"top_k", p.top_k},
      {"repetition_penalty", p.repetition_penalty},
      {"seed", p.seed},
      {"max_new_tokens", p.max_new_tokens},
  };
  return sha256_hex(canonical.dump());
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

static std::filesystem::path entry_path(const std::filesystem::path& dir, const std::string& key) {
  return dir / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  const auto path = entry_path(dir_, key);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json entry = json::parse(in, nullptr, false);
  if (entry.is_discarded() || !entry.contains("response") || !entry["response"].is_string()) {
    std::cerr << "cache: dropping corrupt entry " << path.string() << "\n";
    std::error_code ec;
    std::filesystem::remove(path, ec);
    return std::nullopt;
  }
  return entry["response"].get<std::string>();
}

void ResponseCache::put(const std::string& key, const json& request_echo,
                        const std::string& response) const {
  const auto path = entry_path(dir_, key);
  std::filesystem::create_directories(path.parent_path());
  json entry{{"key", key}, {"request", request_echo}, {"response", response}};

  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(counter.fetch_add(1)) + "-" +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) & 0xffff);
  {
    std::ofstream out(tmp);
    out << entry.dump(1) << "\n";
    if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

InferenceClient::InferenceClient(ModelProfile profile, RetryPolicy retry, ResponseCache* cache)
    : profile_(std::move(profile)), retry_(retry), cache_(cache) {}

json InferenceClient::request_body(const ChatRequest& req) const {
  const auto& p = req.params;
  if (profile_.protocol == WireProtocol::chat_completions) {
    json messages = json::array();
    if (profile_.system_prompt)
      messages.push_back({{"role", "system"}, {"content", *profile_.system_prompt}});
    messages.push_back({{"role", "user"}, {"content", req.user_message}});
    return json{
        {"model", profile_.model_name},
        {"messages", messages},
        {"temperature", p.temperature},
        {"top_p", p.top_p},
        {"top_k", p.top_k},
        {"repetition_penalty", p.repetition_penalty},
        {"seed", p.seed},
        {"max_tokens", p.max_new_tokens},
    };
  }
  std::string inputs = profile_.system_prompt ? *profile_.system_prompt + "\n\n" + req.user_message
                                              : req.user_message;
  return json{{"inputs", inputs},
              {"parameters",
               {{"temperature", p.temperature},
                {"top_p", p.top_p},
                {"top_k", p.top_k},
                {"repetition_penalty", p.repetition_penalty},
                {"seed", p.seed},
                {"max_new_tokens", p.max_new_tokens},
                {"do_sample", p.temperature > 0.0}}}};
}

ChatExchange InferenceClient::fetch(const ChatRequest& req) {
  ChatExchange ex;
  ex.request = req;

  const Endpoint ep = parse_endpoint(profile_.endpoint);
  const std::string path =
      ep.prefix + (profile_.protocol == WireProtocol::chat_completions ? "/v1/chat/completions"
                                                                       : "/generate");
  const std::string body = request_body(req).dump();

  httplib::Headers headers;
  if (!profile_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + profile_.api_key);

  for (int attempt = 0;; ++attempt) {
    httplib::Client cli(ep.base);
    cli.set_connection_timeout(profile_.connect_timeout_s, 0);
    cli.set_read_timeout(profile_.read_timeout_s, 0);
    cli.set_write_timeout(profile_.read_timeout_s, 0);

    auto res = cli.Post(path, headers, body, "application/json");
    bool retryable;
    if (!res) {
      ex.error = "transport error: " + httplib::to_string(res.error());
      retryable = true;
    } else if (res->status >= 200 && res->status < 300) {
      json j = json::parse(res->body, nullptr, false);
      try {
        if (j.is_discarded()) throw std::runtime_error("not JSON");
        if (profile_.protocol == WireProtocol::chat_completions) {
          ex.response = j.at("choices").at(0).at("message").at("content").get<std::string>();
        } else if (j.is_array()) {
          ex.response = j.at(0).at("generated_text").get<std::string>();
        } else {
          ex.response = j.at("generated_text").get<std::string>();
        }
        ex.ok = true;
        return ex;
      } catch (const std::exception&) {
        ex.error = "unexpected response body: " + excerpt(res->body);
        retryable = false;
      }
    } else {
      ex.error = "HTTP " + std::to_string(res->status) + ": " + excerpt(res->body);
      retryable = retryable_status(res->status);
    }

    if (!retryable || attempt + 1 >= retry_.max_attempts) return ex;
    auto delay = retry_.base_delay;
    for (int i = 0; i < attempt; ++i)
      delay = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(delay.count()) * retry_.multiplier));
    std::this_thread::sleep_for(delay);
  }
}

ChatExchange InferenceClient::complete(const ChatRequest& req) {
  const std::string key = cache_key(profile_, req);
  if (cache_) {
    if (auto hit = cache_->get(key)) {
      ChatExchange ex;
      ex.request = req;
      ex.cache_key = key;
      ex.response = *hit;
      ex.ok = true;
      ex.cached = true;
      return ex;
    }
  }
  ChatExchange ex = fetch(req);
  ex.cache_key = key;
  if (ex.ok && cache_) cache_->put(key, request_body(req), ex.response);
  return ex;
}

std::vector<ChatExchange> InferenceClient::run_batch(const std::vector<ChatRequest>& requests,
                                                     int parallelism) {
  if (parallelism < 1) parallelism = 1;
  const size_t n = requests.size();
  std::vector<ChatExchange> results(n);

  struct Group {
    std::string key;
    size_t first = 0;
    std::vector<size_t> indices;
  };
  std::vector<Group> groups;
  std::unordered_map<std::string, size_t> group_of;
  for (size_t i = 0; i < n; ++i) {
    std::string key = cache_key(profile_, requests[i]);
    auto [it, fresh] = group_of.try_emplace(key, groups.size());
    if (fresh) groups.push_back({std::move(key), i, {}});
    groups[it->second].indices.push_back(i);
  }

  auto fill = [&](const Group& g, const ChatExchange& ex) {
    for (size_t idx : g.indices) {
      results[idx] = ex;
      results[idx].request = requests[idx];
    }
  };

  std::vector<size_t> pending;
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const Group& g = groups[gi];
    if (cache_) {
      if (auto hit = cache_->get(g.key)) {
        ChatExchange ex;
        ex.cache_key = g.key;
        ex.response = *hit;
        ex.ok = true;
        ex.cached = true;
        fill(g, ex);
        continue;
      }
    }
    pending.push_back(gi);
  }

  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      size_t k = cursor.fetch_add(1);
      if (k >= pending.size()) break;
      const Group& g = groups[pending[k]];
      ChatExchange ex = fetch(requests[g.first]);
      ex.cache_key = g.key;
      if (ex.ok && cache_) cache_->put(g.key, request_body(requests[g.first]), ex.response);
      fill(g, ex);
    }
  };

  const size_t workers = std::min<size_t>(static_cast<size_t>(parallelism), pending.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace faithcheck
