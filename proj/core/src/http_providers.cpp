#include "hope/http_providers.hpp"

#include <chrono>
#include <cstdlib>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace hope::llm {

using nlohmann::json;

namespace {

constexpr std::ptrdiff_t kSemaphoreCeiling = 1 << 10;

struct ParsedEndpoint {
    std::string host_port;   // scheme://host[:port]
    std::string path_prefix; // e.g. "/v1", may be empty
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
    if (endpoint.empty()) throw usage_error("http provider requires an endpoint");
    std::size_t scheme = endpoint.find("://");
    std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    std::size_t path = endpoint.find('/', host_start);
    if (path == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(path);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, path), prefix};
}

std::string api_key(const std::string& env_name) {
    if (const char* key = std::getenv(env_name.c_str())) return key;
    if (const char* key = std::getenv("OPENAI_API_KEY")) return key;
    return "";
}

// Shared POST-with-retry plumbing for both provider kinds.
class Transport {
public:
    Transport(const HttpOptions& options)
        : options_(options),
          endpoint_(parse_endpoint(options.endpoint)),
          key_(api_key(options.api_key_env)),
          in_flight_(std::min<std::ptrdiff_t>(std::max(options.max_in_flight, 1),
                                              kSemaphoreCeiling)) {}

    json post(const std::string& path, const json& body) {
        httplib::Headers headers;
        if (!key_.empty()) headers.emplace("Authorization", "Bearer " + key_);

        std::string last_failure = "no attempt made";
        for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
            if (attempt > 0) {
                auto backoff = std::chrono::milliseconds(250) * (1 << (attempt - 1));
                std::this_thread::sleep_for(backoff);
            }
            in_flight_.acquire();
            httplib::Client client(endpoint_.host_port);
            client.set_connection_timeout(options_.timeout_seconds, 0);
            client.set_read_timeout(options_.timeout_seconds, 0);
            auto result = client.Post(endpoint_.path_prefix + path, headers, body.dump(),
                                      "application/json");
            in_flight_.release();

            if (!result) {
                last_failure = "transport error: " + httplib::to_string(result.error());
                continue;
            }
            if (result->status == 429 || result->status >= 500) {
                last_failure = "HTTP " + std::to_string(result->status);
                continue; // retryable
            }
            if (result->status != 200) {
                throw provider_error("HTTP " + std::to_string(result->status) + " from " +
                                     options_.endpoint + path);
            }
            json parsed = json::parse(result->body, nullptr, false);
            if (parsed.is_discarded()) {
                last_failure = "unparseable JSON response";
                continue;
            }
            return parsed;
        }
        throw provider_error("request to " + options_.endpoint + path + " failed after " +
                             std::to_string(options_.max_retries + 1) + " attempts (" +
                             last_failure + ")");
    }

    const HttpOptions& options() const { return options_; }

private:
    HttpOptions options_;
    ParsedEndpoint endpoint_;
    std::string key_; // kept out of error messages and logs
    std::counting_semaphore<kSemaphoreCeiling> in_flight_;
};

} // namespace

// ---------------------------------------------------------------------------
// Chat completions
// ---------------------------------------------------------------------------

struct HttpLlmProvider::Impl {
    Impl(HttpOptions options, PromptLibrary prompts)
        : transport(options), prompts(std::move(prompts)) {}

    Transport transport;
    PromptLibrary prompts;
};

HttpLlmProvider::HttpLlmProvider(HttpOptions options, PromptLibrary prompts)
    : impl_(std::make_unique<Impl>(std::move(options), std::move(prompts))) {}

HttpLlmProvider::~HttpLlmProvider() = default;

std::string HttpLlmProvider::generate(const GenerationRequest& request) {
    json body;
    body["model"] = impl_->transport.options().model;
    body["temperature"] = request.temperature;
    body["messages"] = json::array(
        {{{"role", "user"}, {"content", impl_->prompts.render(request.task, request.prompt_parts)}}});

    json response = impl_->transport.post("/chat/completions", body);
    try {
        return response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw provider_error("chat response missing choices[0].message.content");
    }
}

std::string HttpLlmProvider::id() const {
    return "http:" + impl_->transport.options().model;
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

struct HttpEmbedder::Impl {
    explicit Impl(HttpOptions options) : transport(options) {}
    Transport transport;
};

HttpEmbedder::HttpEmbedder(HttpOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

HttpEmbedder::~HttpEmbedder() = default;

embedding::EmbeddingVector HttpEmbedder::embed(std::string_view text) {
    if (text.empty()) throw data_error("embed: text must be non-empty");

    json body;
    body["model"] = impl_->transport.options().model;
    body["input"] = json::array({std::string(text)});

    json response = impl_->transport.post("/embeddings", body);
    embedding::EmbeddingVector vector;
    try {
        vector = response.at("data").at(0).at("embedding").get<embedding::EmbeddingVector>();
    } catch (const json::exception&) {
        throw provider_error("embedding response missing data[0].embedding");
    }
    if (vector.empty()) throw provider_error("embedding provider returned an empty vector");
    double norm_sq = 0.0;
    for (double v : vector) norm_sq += v * v;
    if (norm_sq == 0.0) throw provider_error("embedding provider returned a zero vector");
    return vector;
}

std::string HttpEmbedder::id() const {
    return "http:" + impl_->transport.options().model;
}

} // namespace hope::llm
