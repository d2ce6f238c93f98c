#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "classim/embed.hpp"
#include "classim/kb.hpp"

namespace classim::llm {

enum class TemplateId { lecture, notes, plan, answer, judge, decompose, translate, hyde };

const char* template_name(TemplateId t);
std::optional<TemplateId> template_from_name(const std::string& name);

struct Sampling {
    double temperature = 0.0;
    int max_tokens = 1024;
};

struct ChatRequest {
    TemplateId template_id = TemplateId::lecture;
    std::map<std::string, std::string> variables;
    Sampling sampling{};
};

struct RetryPolicy {
    int max_attempts = 3;
    int backoff_ms = 250;  // doubled per retry
};

enum class ProviderKind { scripted_mock, http_chat };

struct ProviderConfig {
    ProviderKind kind = ProviderKind::scripted_mock;
    std::string endpoint;        // http_chat
    std::string embed_endpoint;  // http_chat
    std::string auth_env = "LLM_API_KEY";
    std::string model = "mistral-medium-3.1";
    RetryPolicy retry{};
    std::string fixture_path;  // scripted_mock, optional overrides
    int embed_dimension = 256;
    int max_inflight = 4;  // live request concurrency cap

    void validate() const;
};

struct TransportError : std::runtime_error {
    TransportError(const std::string& what, bool retryable)
        : std::runtime_error(what), retryable(retryable) {}
    bool retryable;
};

struct AuthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FixtureMissError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Gateway {
  public:
    virtual ~Gateway() = default;
    virtual std::string chat(const ChatRequest& req) = 0;
    virtual embed::Vector embed_text(const std::string& text) = 0;
    virtual int embed_dimension() const = 0;
};

// Fixture entry: response served when template matches and every `match`
// variable equals the request's value.
struct Fixture {
    TemplateId template_id;
    std::map<std::string, std::string> match;
    std::string response;
};

std::vector<Fixture> load_fixtures(const std::string& path);

// Deterministic offline provider. Output is a pure function of
// (template_id, variables). Fixtures override the built-in scripted
// responses; lookup prefers the most specific match.
class MockGateway final : public Gateway {
  public:
    explicit MockGateway(int embed_dimension = 256) : dimension_(embed_dimension) {}
    MockGateway(std::vector<Fixture> fixtures, int embed_dimension = 256)
        : fixtures_(std::move(fixtures)), dimension_(embed_dimension) {}

    std::string chat(const ChatRequest& req) override;
    embed::Vector embed_text(const std::string& text) override {
        return embed::hashed_bag_embedding(text, dimension_);
    }
    int embed_dimension() const override { return dimension_; }

  private:
    std::optional<std::string> fixture_lookup(const ChatRequest& req) const;
    std::string scripted(const ChatRequest& req) const;

    std::vector<Fixture> fixtures_;
    int dimension_;
};

// Chat-completion provider over HTTP with retry and a request concurrency cap.
class HttpGateway final : public Gateway {
  public:
    explicit HttpGateway(ProviderConfig cfg);
    ~HttpGateway() override;

    std::string chat(const ChatRequest& req) override;
    embed::Vector embed_text(const std::string& text) override;
    int embed_dimension() const override { return cfg_.embed_dimension; }

  private:
    struct Impl;
    ProviderConfig cfg_;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<Gateway> make_gateway(const ProviderConfig& cfg);

// Fills the fixed prompt template for a request (live mode; non-normative).
std::string render_prompt(const ChatRequest& req);

// Mock embedder backed by a gateway, for corpus seeding.
class GatewayEmbedder final : public embed::Embedder {
  public:
    explicit GatewayEmbedder(Gateway& gw) : gw_(gw) {}
    embed::Vector embed(const std::string& text) override { return gw_.embed_text(text); }
    int dimension() const override { return gw_.embed_dimension(); }

  private:
    Gateway& gw_;
};

}  // namespace classim::llm
