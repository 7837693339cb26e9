#include "geobench/model_client.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "geobench/digest.hpp"
#include "geobench/ini.hpp"
#include "geobench/rng.hpp"
#include "geobench/util.hpp"

namespace geobench {

using nlohmann::json;

std::string_view to_string(ClientErrorKind k) {
  switch (k) {
    case ClientErrorKind::AuthFailure: return "AuthFailure";
    case ClientErrorKind::RateLimited: return "RateLimited";
    case ClientErrorKind::Transport: return "Transport";
    case ClientErrorKind::MalformedProviderReply: return "MalformedProviderReply";
    case ClientErrorKind::UnsupportedCapability: return "UnsupportedCapability";
  }
  return "?";
}

std::int64_t estimate_tokens(std::string_view text) {
  std::int64_t count = 0;
  bool in_word = false;
  for (char c : text) {
    const bool ws = std::isspace(static_cast<unsigned char>(c));
    if (!ws && !in_word) ++count;
    in_word = !ws;
  }
  return count;
}

std::string api_key_env_name(const std::string& provider_id) {
  std::string up = provider_id;
  for (char& c : up) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    else
      c = '_';
  }
  return "GEOBENCH_API_KEY_" + up;
}

namespace {

bool parse_bool(const std::string& v, const std::string& where) {
  const std::string t = util::to_lower(util::trim(v));
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw DataError(where + ": expected boolean, got \"" + v + "\"");
}

}  // namespace

std::map<std::string, ProviderConfig> load_provider_configs(const std::filesystem::path& path) {
  const auto doc = ini::parse_file(path);
  std::map<std::string, ProviderConfig> out;
  for (const auto& [section, kv] : doc) {
    if (!section.starts_with("provider.")) continue;
    ProviderConfig cfg;
    cfg.id = section.substr(std::string("provider.").size());
    if (cfg.id.empty()) throw DataError(path.string() + ": empty provider id");
    for (const auto& [key, value] : kv) {
      const std::string where = path.string() + ": [" + section + "] " + key;
      if (key == "kind") cfg.kind = util::to_lower(value);
      else if (key == "endpoint") cfg.endpoint = value;
      else if (key == "model") cfg.model = value;
      else if (key == "supports_logprobs") cfg.supports_logprobs = parse_bool(value, where);
      else if (key == "accepts_image_url") cfg.accepts_image_url = parse_bool(value, where);
      else if (key == "requires_api_key") cfg.requires_api_key = parse_bool(value, where);
      else if (key == "script") {
        std::filesystem::path p(value);
        cfg.script = p.is_absolute() ? p.string() : (path.parent_path() / p).string();
      } else {
        throw DataError(where + ": unknown key");
      }
    }
    if (cfg.kind != "mock" && cfg.kind != "openai")
      throw DataError(path.string() + ": provider " + cfg.id + ": unknown kind \"" + cfg.kind +
                      "\"");
    if (cfg.kind == "openai" && cfg.endpoint.empty())
      throw DataError(path.string() + ": provider " + cfg.id + ": endpoint required");
    if (cfg.kind == "mock") cfg.requires_api_key = false;
    out.emplace(cfg.id, std::move(cfg));
  }
  return out;
}

// ---- ModelClient ----------------------------------------------------------

ModelClient::ModelClient(RetryPolicy policy) : policy_(policy), jitter_gen_(policy.jitter_seed) {
  if (policy_.max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
}

void ModelClient::register_provider(std::unique_ptr<Provider> provider) {
  const std::string id = provider->config().id;
  providers_[id] = std::move(provider);
}

ModelClient ModelClient::from_config(const std::filesystem::path& path, RetryPolicy policy) {
  ModelClient client(policy);
  for (const auto& [id, cfg] : load_provider_configs(path))
    client.register_provider(make_provider(cfg));
  return client;
}

bool ModelClient::has_provider(const std::string& id) const { return providers_.count(id) > 0; }

const ProviderConfig& ModelClient::provider_config(const std::string& id) const {
  const auto it = providers_.find(id);
  if (it == providers_.end())
    throw std::invalid_argument("unknown provider: " + id);
  return it->second->config();
}

Provider& ModelClient::provider_for(const ModelRequest& request) {
  const auto it = providers_.find(request.provider);
  if (it == providers_.end())
    throw std::invalid_argument("unknown provider: " + request.provider);
  return *it->second;
}

double ModelClient::jittered_delay_s(int retry_index) {
  double delay = policy_.base_delay_s * std::pow(2.0, retry_index);
  delay = std::min(delay, policy_.max_delay_s);
  std::lock_guard lock(jitter_mutex_);
  return delay * (0.5 + 0.5 * rng::unit_real(jitter_gen_));
}

ModelResponse ModelClient::complete(const ModelRequest& request) {
  if (request.prompt.empty()) throw std::invalid_argument("prompt must be non-empty");
  Provider& provider = provider_for(request);

  for (int attempt = 0;; ++attempt) {
    try {
      return provider.complete_once(request);
    } catch (const ClientError& e) {
      const bool retryable =
          e.kind() == ClientErrorKind::RateLimited || e.kind() == ClientErrorKind::Transport;
      if (!retryable || attempt + 1 >= policy_.max_attempts) throw;
      const double delay = jittered_delay_s(attempt);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
  }
}

std::vector<ModelClient::Outcome> ModelClient::complete_batch(
    std::span<const ModelRequest> requests, int max_in_flight) {
  if (max_in_flight < 1) throw std::invalid_argument("max_in_flight must be at least 1");
  std::vector<Outcome> outcomes(requests.size(),
                                ClientErrorInfo{ClientErrorKind::Transport, "not executed"});
  if (requests.empty()) return outcomes;

  const size_t workers = std::min<size_t>(static_cast<size_t>(max_in_flight), requests.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= requests.size()) break;
      try {
        outcomes[i] = complete(requests[i]);
      } catch (const ClientError& e) {
        outcomes[i] = ClientErrorInfo{e.kind(), e.what()};
      } catch (const std::exception& e) {
        outcomes[i] = ClientErrorInfo{ClientErrorKind::Transport, e.what()};
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return outcomes;
}

// ---- MockProvider ----------------------------------------------------------

MockProvider::MockProvider(ProviderConfig config, std::vector<MockRule> rules)
    : config_(std::move(config)), rules_(std::move(rules)) {}

std::unique_ptr<MockProvider> MockProvider::from_config(const ProviderConfig& config) {
  std::vector<MockRule> rules;
  if (!config.script.empty()) {
    const auto lines = util::read_lines(config.script);
    size_t lineno = 0;
    for (const auto& line : lines) {
      ++lineno;
      if (util::trim(line).empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const std::exception& e) {
        throw DataError(config.script + ": line " + std::to_string(lineno) + ": " + e.what());
      }
      MockRule rule;
      rule.image_ref = j.value("image_ref", "");
      rule.contains = j.value("contains", "");
      auto parse_step = [&](const json& sj) {
        MockStep step;
        if (sj.contains("fail")) {
          const std::string f = sj["fail"].get<std::string>();
          if (f == "RateLimited") step.fail = ClientErrorKind::RateLimited;
          else if (f == "Transport") step.fail = ClientErrorKind::Transport;
          else if (f == "AuthFailure") step.fail = ClientErrorKind::AuthFailure;
          else if (f == "MalformedProviderReply") step.fail = ClientErrorKind::MalformedProviderReply;
          else if (f == "UnsupportedCapability") step.fail = ClientErrorKind::UnsupportedCapability;
          else
            throw DataError(config.script + ": line " + std::to_string(lineno) +
                            ": unknown fail kind \"" + f + "\"");
        }
        step.text = sj.value("text", "");
        step.tokens = sj.value("tokens", std::int64_t{-1});
        step.latency_s = sj.value("latency_s", 0.0);
        step.sleep_ms = sj.value("sleep_ms", 0);
        if (sj.contains("logprobs")) step.logprobs = sj["logprobs"].get<std::vector<double>>();
        if (sj.contains("logprob_fill")) {
          const auto& lf = sj["logprob_fill"];
          step.logprobs = std::vector<double>(lf.at("count").get<size_t>(),
                                              lf.at("value").get<double>());
        }
        return step;
      };
      if (j.contains("steps")) {
        for (const auto& sj : j["steps"]) rule.steps.push_back(parse_step(sj));
      } else {
        rule.steps.push_back(parse_step(j));
      }
      if (rule.steps.empty())
        throw DataError(config.script + ": line " + std::to_string(lineno) + ": rule has no steps");
      rules.push_back(std::move(rule));
    }
  }
  return std::make_unique<MockProvider>(config, std::move(rules));
}

ModelResponse MockProvider::complete_once(const ModelRequest& request) {
  calls_.fetch_add(1);
  const int now = in_flight_.fetch_add(1) + 1;
  int prev_peak = peak_.load();
  while (now > prev_peak && !peak_.compare_exchange_weak(prev_peak, now)) {
  }
  struct Guard {
    std::atomic<int>& gauge;
    ~Guard() { gauge.fetch_sub(1); }
  } guard{in_flight_};

  const MockStep* step = nullptr;
  {
    std::lock_guard lock(mutex_);
    for (size_t r = 0; r < rules_.size(); ++r) {
      const auto& rule = rules_[r];
      if (!rule.image_ref.empty() && rule.image_ref != request.image_ref) continue;
      if (!rule.contains.empty() && request.prompt.find(rule.contains) == std::string::npos &&
          request.score_text.find(rule.contains) == std::string::npos)
        continue;
      const size_t attempt = attempt_counts_[r]++;
      step = &rule.steps[std::min(attempt, rule.steps.size() - 1)];
      break;
    }
  }
  if (!step)
    throw ClientError(ClientErrorKind::MalformedProviderReply,
                      "mock: no rule matches request (image_ref=" + request.image_ref + ")");

  if (step->sleep_ms > 0)
    std::this_thread::sleep_for(std::chrono::milliseconds(step->sleep_ms));
  if (step->fail) throw ClientError(*step->fail, "mock scripted failure");

  if ((request.want_logprobs || !request.score_text.empty()) && !config_.supports_logprobs)
    throw ClientError(ClientErrorKind::UnsupportedCapability,
                      "provider " + config_.id + " does not expose log-probabilities");

  ModelResponse resp;
  resp.text = step->text;
  resp.latency_seconds = step->latency_s;
  if (step->tokens >= 0) {
    resp.generated_tokens = step->tokens;
  } else {
    resp.generated_tokens = estimate_tokens(resp.text);
    resp.tokens_estimated = true;
  }
  if (request.want_logprobs || !request.score_text.empty()) {
    if (step->logprobs) {
      resp.logprobs = step->logprobs;
    } else {
      throw ClientError(ClientErrorKind::MalformedProviderReply,
                        "mock: logprobs requested but not scripted");
    }
  }
  return resp;
}

// ---- OpenAI-compatible chat adapter ----------------------------------------

namespace {

// endpoint "http://host:port/basepath" -> {origin, basepath}
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos)
    throw std::invalid_argument("endpoint must include a scheme: " + endpoint);
  const size_t path_start = endpoint.find('/', scheme + 3);
  if (path_start == std::string::npos) return {endpoint, ""};
  std::string base = endpoint.substr(path_start);
  while (base.size() > 1 && base.back() == '/') base.pop_back();
  if (base == "/") base.clear();
  return {endpoint.substr(0, path_start), base};
}

std::string guess_mime(const std::string& ref) {
  const std::string lower = util::to_lower(ref);
  if (lower.ends_with(".png")) return "image/png";
  if (lower.ends_with(".webp")) return "image/webp";
  if (lower.ends_with(".gif")) return "image/gif";
  return "image/jpeg";
}

std::filesystem::path image_cache_dir() {
  if (const auto dir = util::getenv_str("GEOBENCH_CACHE_DIR")) return *dir;
  return std::filesystem::temp_directory_path() / "geobench_cache";
}

std::string fetch_remote(const std::string& url) {
  const auto [origin, path] = split_endpoint(url);
  httplib::Client cli(origin);
  cli.set_connection_timeout(10);
  cli.set_read_timeout(60);
  auto res = cli.Get(path.empty() ? "/" : path);
  if (!res)
    throw ClientError(ClientErrorKind::Transport,
                      "image fetch failed: " + url + ": " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw ClientError(ClientErrorKind::Transport,
                      "image fetch failed: " + url + ": HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace

OpenAiChatProvider::OpenAiChatProvider(ProviderConfig config) : config_(std::move(config)) {}

std::string OpenAiChatProvider::image_payload(const std::string& image_ref) {
  const bool remote = image_ref.starts_with("http://") || image_ref.starts_with("https://");
  if (remote && config_.accepts_image_url) return image_ref;

  std::string bytes;
  if (remote) {
    // Fetched once per ref and kept on disk across runs.
    const auto dir = image_cache_dir();
    const auto cached = dir / (digest::sha256_hex(image_ref) + ".bin");
    std::lock_guard lock(cache_mutex_);
    if (std::filesystem::exists(cached)) {
      bytes = util::read_file(cached);
    } else {
      bytes = fetch_remote(image_ref);
      std::filesystem::create_directories(dir);
      util::write_file(cached, bytes);
    }
  } else {
    try {
      bytes = util::read_file(image_ref);
    } catch (const DataError& e) {
      throw ClientError(ClientErrorKind::Transport, e.what());
    }
  }
  return "data:" + guess_mime(image_ref) + ";base64," + util::base64_encode(bytes);
}

ModelResponse OpenAiChatProvider::complete_once(const ModelRequest& request) {
  if (!request.score_text.empty())
    throw ClientError(ClientErrorKind::UnsupportedCapability,
                      "chat schema cannot score supplied text");
  if (request.want_logprobs && !config_.supports_logprobs)
    throw ClientError(ClientErrorKind::UnsupportedCapability,
                      "provider " + config_.id + " does not expose log-probabilities");

  std::string api_key;
  if (config_.requires_api_key) {
    const auto key = util::getenv_str(api_key_env_name(config_.id));
    if (!key || key->empty())
      throw ClientError(ClientErrorKind::AuthFailure,
                        "missing credential: set " + api_key_env_name(config_.id));
    api_key = *key;
  }

  json content = json::array();
  content.push_back({{"type", "text"}, {"text", request.prompt}});
  if (!request.image_ref.empty()) {
    content.push_back(
        {{"type", "image_url"}, {"image_url", {{"url", image_payload(request.image_ref)}}}});
  }
  json body = {
      {"model", request.model.empty() ? config_.model : request.model},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output_tokens},
      {"messages", json::array({{{"role", "user"}, {"content", content}}})},
  };
  if (request.want_logprobs) body["logprobs"] = true;

  const auto [origin, base] = split_endpoint(config_.endpoint);
  httplib::Client cli(origin);
  cli.set_connection_timeout(10);
  cli.set_read_timeout(300);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  const auto start = std::chrono::steady_clock::now();
  auto res = cli.Post(base + "/chat/completions", headers, body.dump(), "application/json");
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!res)
    throw ClientError(ClientErrorKind::Transport,
                      "request failed: " + httplib::to_string(res.error()));
  if (res->status == 401 || res->status == 403)
    throw ClientError(ClientErrorKind::AuthFailure, "provider rejected credential (HTTP " +
                                                        std::to_string(res->status) + ")");
  if (res->status == 429)
    throw ClientError(ClientErrorKind::RateLimited, "provider rate limit (HTTP 429)");
  if (res->status >= 500)
    throw ClientError(ClientErrorKind::Transport,
                      "provider error (HTTP " + std::to_string(res->status) + ")");
  if (res->status != 200)
    throw ClientError(ClientErrorKind::MalformedProviderReply,
                      "unexpected HTTP status " + std::to_string(res->status) + ": " + res->body);

  try {
    const json reply = json::parse(res->body);
    const json& choice = reply.at("choices").at(0);
    ModelResponse out;
    out.text = choice.at("message").at("content").get<std::string>();
    out.latency_seconds = elapsed;
    if (reply.contains("usage") && reply["usage"].contains("completion_tokens")) {
      out.generated_tokens = reply["usage"]["completion_tokens"].get<std::int64_t>();
    } else {
      out.generated_tokens = estimate_tokens(out.text);
      out.tokens_estimated = true;
    }
    if (request.want_logprobs) {
      std::vector<double> lps;
      for (const auto& tok : choice.at("logprobs").at("content"))
        lps.push_back(tok.at("logprob").get<double>());
      out.logprobs = std::move(lps);
    }
    return out;
  } catch (const ClientError&) {
    throw;
  } catch (const std::exception& e) {
    throw ClientError(ClientErrorKind::MalformedProviderReply,
                      std::string("cannot parse provider reply: ") + e.what());
  }
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config) {
  if (config.kind == "mock") return MockProvider::from_config(config);
  if (config.kind == "openai") return std::make_unique<OpenAiChatProvider>(config);
  throw std::invalid_argument("unknown provider kind: " + config.kind);
}

}  // namespace geobench
