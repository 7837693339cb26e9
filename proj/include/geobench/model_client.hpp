#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace geobench {

enum class ClientErrorKind {
  AuthFailure,
  RateLimited,
  Transport,
  MalformedProviderReply,
  UnsupportedCapability,
};

std::string_view to_string(ClientErrorKind k);

class ClientError : public std::runtime_error {
 public:
  ClientError(ClientErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ClientErrorKind kind() const { return kind_; }

 private:
  ClientErrorKind kind_;
};

// Value form of a ClientError for per-item batch outcomes.
struct ClientErrorInfo {
  ClientErrorKind kind;
  std::string message;
};

struct ModelRequest {
  std::string provider;
  std::string model;
  std::string prompt;
  std::string image_ref;  // URL or local path; empty for text-only judging
  double temperature = 0.0;
  int max_output_tokens = 1024;
  bool want_logprobs = false;
  // When non-empty, asks the provider to score these tokens (per-token
  // log-probabilities of this exact text continuing the prompt) instead of
  // generating. Only providers that can score supplied text support this.
  std::string score_text;
};

struct ModelResponse {
  std::string text;
  std::int64_t generated_tokens = 0;
  double latency_seconds = 0.0;
  std::optional<std::vector<double>> logprobs;
  bool tokens_estimated = false;  // true when counted by whitespace fallback
};

struct ProviderConfig {
  std::string id;
  std::string kind;  // "openai" (chat-completions schema) or "mock"
  std::string endpoint;
  std::string model;  // default model name
  bool supports_logprobs = false;
  bool accepts_image_url = true;
  bool requires_api_key = true;
  std::string script;  // mock: path to its reply script
};

// [provider.<id>] sections of an INI file.
std::map<std::string, ProviderConfig> load_provider_configs(const std::filesystem::path& path);

class Provider {
 public:
  virtual ~Provider() = default;
  // One attempt, no retries; throws ClientError.
  virtual ModelResponse complete_once(const ModelRequest& request) = 0;
  virtual const ProviderConfig& config() const = 0;
};

struct RetryPolicy {
  int max_attempts = 4;        // total attempts per request
  double base_delay_s = 0.5;   // first backoff; doubles per retry
  double max_delay_s = 8.0;
  std::uint64_t jitter_seed = 0;
};

// Provider-agnostic front end: retries transient failures with exponential
// backoff plus jitter, and fans batches out over a bounded worker pool.
// Shareable across threads.
class ModelClient {
 public:
  explicit ModelClient(RetryPolicy policy = {});

  void register_provider(std::unique_ptr<Provider> provider);
  static ModelClient from_config(const std::filesystem::path& path, RetryPolicy policy = {});

  bool has_provider(const std::string& id) const;
  const ProviderConfig& provider_config(const std::string& id) const;

  ModelResponse complete(const ModelRequest& request);

  using Outcome = std::variant<ModelResponse, ClientErrorInfo>;
  // Outcomes in input order; at most max_in_flight requests outstanding.
  std::vector<Outcome> complete_batch(std::span<const ModelRequest> requests, int max_in_flight);

  const RetryPolicy& retry_policy() const { return policy_; }

 private:
  Provider& provider_for(const ModelRequest& request);
  double jittered_delay_s(int retry_index);

  RetryPolicy policy_;
  std::map<std::string, std::unique_ptr<Provider>> providers_;
  std::mutex jitter_mutex_;
  std::mt19937_64 jitter_gen_;
};

// Whitespace-delimited token estimate used when a provider reports no usage.
std::int64_t estimate_tokens(std::string_view text);

// Name of the environment variable holding the API key for a provider id.
std::string api_key_env_name(const std::string& provider_id);

// ---- Offline mock provider ---------------------------------------------

// One scripted reaction; a rule's steps are consumed per attempt
// (the last step repeats once exhausted).
struct MockStep {
  std::optional<ClientErrorKind> fail;  // throw instead of replying
  std::string text;
  std::int64_t tokens = -1;  // -1: estimate from text
  double latency_s = 0.0;    // reported, not slept
  std::optional<std::vector<double>> logprobs;
  int sleep_ms = 0;  // real delay, for concurrency tests
};

struct MockRule {
  std::string image_ref;  // exact match; empty matches any
  std::string contains;   // prompt substring; empty matches any
  std::vector<MockStep> steps;
};

class MockProvider : public Provider {
 public:
  MockProvider(ProviderConfig config, std::vector<MockRule> rules);
  // Loads rules from the JSONL script referenced by config.script.
  static std::unique_ptr<MockProvider> from_config(const ProviderConfig& config);

  ModelResponse complete_once(const ModelRequest& request) override;
  const ProviderConfig& config() const override { return config_; }

  int peak_concurrency() const { return peak_.load(); }
  std::int64_t calls() const { return calls_.load(); }

 private:
  ProviderConfig config_;
  std::vector<MockRule> rules_;
  std::mutex mutex_;
  std::map<size_t, size_t> attempt_counts_;  // rule index -> attempts so far
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
  std::atomic<std::int64_t> calls_{0};
};

// ---- OpenAI-compatible chat adapter --------------------------------------

class OpenAiChatProvider : public Provider {
 public:
  explicit OpenAiChatProvider(ProviderConfig config);
  ModelResponse complete_once(const ModelRequest& request) override;
  const ProviderConfig& config() const override { return config_; }

 private:
  std::string image_payload(const std::string& image_ref);

  ProviderConfig config_;
  std::mutex cache_mutex_;
};

std::unique_ptr<Provider> make_provider(const ProviderConfig& config);

}  // namespace geobench
