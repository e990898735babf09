#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "hope/embedding.hpp"
#include "hope/llm.hpp"
#include "hope/prompts.hpp"

namespace hope::llm {

struct HttpOptions {
    std::string endpoint;       // e.g. "http://localhost:8080" or "https://api.openai.com"
    std::string model;
    int timeout_seconds = 60;
    int max_retries = 2;        // retries after the first attempt, exponential backoff
    int max_in_flight = 4;      // global in-flight request limit
    std::string api_key_env = "HOPE_API_KEY"; // falls back to OPENAI_API_KEY
};

/// OpenAI-compatible chat-completions client. Requests are rendered through
/// the prompt library; the API key comes from the environment and is never
/// logged.
class HttpLlmProvider : public LlmProvider {
public:
    HttpLlmProvider(HttpOptions options, PromptLibrary prompts);
    ~HttpLlmProvider() override;

    std::string generate(const GenerationRequest& request) override;
    std::string id() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// OpenAI-compatible embeddings client (model + input -> vector).
class HttpEmbedder : public embedding::Embedder {
public:
    explicit HttpEmbedder(HttpOptions options);
    ~HttpEmbedder() override;

    embedding::EmbeddingVector embed(std::string_view text) override;
    std::string id() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace hope::llm
