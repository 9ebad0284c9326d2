#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace reformer {

struct LlmError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PromptBundle {
  std::string template_id;
  std::map<std::string, std::string> bindings;
  std::string rendered;
};

// Prompt templates are data; the shipped defaults can be overridden per
// template id by dropping <id>.txt files in a directory.
class PromptCatalog {
 public:
  static PromptCatalog defaults();
  static PromptCatalog from_directory(const std::string& dir);

  bool has(const std::string& template_id) const;
  const std::string& text(const std::string& template_id) const;

  // Substitutes {placeholder} occurrences. Throws naming the first missing
  // binding; extra bindings are allowed (they ride along for the stub).
  PromptBundle render(const std::string& template_id,
                      const std::map<std::string, std::string>& bindings) const;

  void set(const std::string& template_id, std::string text);

 private:
  std::map<std::string, std::string> templates_;
};

struct ChatRequest {
  PromptBundle prompt;
  double temperature = 0.7;
  int max_tokens = 256;
  int sample_index = 0;
};

struct ChatResponse {
  std::string text;
  std::string provider;
  bool cached = false;
};

struct EmbeddingVector {
  std::vector<double> values;
  std::string model_id;

  size_t dimension() const { return values.size(); }
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string name() const = 0;
  virtual std::string model_id() const = 0;
  virtual size_t embedding_dimension() const = 0;
  virtual ChatResponse chat(const ChatRequest& request) = 0;
  virtual EmbeddingVector embed(const std::string& text) = 0;
};

// Deterministic offline provider: rule-based explanations and fills,
// character-trigram hash embeddings. Every response is a pure function of
// the request.
class StubProvider : public Provider {
 public:
  std::string name() const override { return "stub"; }
  std::string model_id() const override { return "stub-v1"; }
  size_t embedding_dimension() const override { return 256; }
  ChatResponse chat(const ChatRequest& request) override;
  EmbeddingVector embed(const std::string& text) override;
};

struct HttpProviderConfig {
  std::string base_url;
  std::string chat_model;
  std::string embedding_model;
  size_t embedding_dim = 1536;
  std::string api_key_env = "LLM_API_KEY";  // key read from env, never config
  int max_retries = 4;
  int initial_backoff_ms = 500;
};

// Chat-completions / embeddings endpoints in the common commercial JSON
// shape, with bounded retries and exponential backoff on transient errors.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig config);
  std::string name() const override { return "http"; }
  std::string model_id() const override { return config_.chat_model; }
  size_t embedding_dimension() const override { return config_.embedding_dim; }
  ChatResponse chat(const ChatRequest& request) override;
  EmbeddingVector embed(const std::string& text) override;

 private:
  std::string post_json(const std::string& path, const std::string& body);
  HttpProviderConfig config_;
  std::string api_key_;
};

// One file per entry under cache_root; filename is the hex digest of the
// full cache key. Replays are bit-exact.
class CachingProvider : public Provider {
 public:
  CachingProvider(std::shared_ptr<Provider> inner, std::string cache_root);
  std::string name() const override { return inner_->name(); }
  std::string model_id() const override { return inner_->model_id(); }
  size_t embedding_dimension() const override { return inner_->embedding_dimension(); }
  ChatResponse chat(const ChatRequest& request) override;
  EmbeddingVector embed(const std::string& text) override;

  static std::string chat_cache_key(const Provider& p, const ChatRequest& r);

 private:
  std::shared_ptr<Provider> inner_;
  std::string cache_root_;
};

}  // namespace reformer
