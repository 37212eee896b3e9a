#pragma once

// Few-shot translation through a remote chat-completion endpoint.
//
// The transport is an interface so the whole path (prompt, request body,
// retries, envelope parsing, call extraction) runs offline against mocks.

#include "geocmd/dataset.hpp"
#include "geocmd/error.hpp"
#include "geocmd/predictions.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geocmd {

inline constexpr std::string_view kApiKeyEnv = "GEOCMD_API_KEY";
inline constexpr std::string_view kCompletionAnchor = "Function Call:";

struct LlmConfig {
    std::string endpoint_url;
    std::string model_name = "command-r-08-2024";
    std::string api_key;
    double temperature = 0.0;
    std::uint32_t max_tokens = 64;
    std::uint32_t timeout_ms = 30000;
    std::uint32_t max_retries = 3;
    std::uint32_t backoff_initial_ms = 500;

    // api_key from GEOCMD_API_KEY; throws LlmError(AuthError) when unset.
    static LlmConfig from_environment(std::string endpoint_url, std::string model_name = "command-r-08-2024");
};

enum class LlmErrorKind { AuthError, RateLimited, Timeout, TransportError, EmptyCompletion };

std::string_view to_string(LlmErrorKind kind) noexcept;

class LlmError : public Error {
public:
    LlmError(LlmErrorKind kind, const std::string& message, bool retryable);

    LlmErrorKind kind() const noexcept { return kind_; }
    bool retryable() const noexcept { return retryable_; }

private:
    LlmErrorKind kind_;
    bool retryable_;
};

struct HttpRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::uint32_t timeout_ms = 30000;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

// Returns whatever status the server sent. Network-level failures are thrown
// as LlmError(Timeout) or LlmError(TransportError).
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const HttpRequest& request) = 0;
};

// cpp-httplib backed transport (https when built with OpenSSL).
class HttpTransport final : public Transport {
public:
    HttpResponse post(const HttpRequest& request) override;
};

struct LlmResponse {
    std::string raw_text;
    std::string extracted_call;
    std::uint32_t attempts = 0;
    double latency_ms = 0.0;
    std::optional<std::uint64_t> prompt_tokens;
    std::optional<std::uint64_t> completion_tokens;
};

// The ten-example few-shot prompt with the query substituted.
std::string build_prompt(std::string_view query);

// JSON request body for one chat request.
std::string build_request_body(const LlmConfig& config, std::string_view prompt);

// Completion text from the common response envelopes (OpenAI-style choices,
// Cohere v1 text / generations, Cohere v2 message.content, content blocks).
// Throws LlmError(TransportError) for an unrecognized envelope.
std::string extract_completion_text(std::string_view response_body);

// First non-blank line, "Function Call:" prefix(es) removed, trimmed.
std::string extract_call(std::string_view raw_text);

using Sleeper = std::function<void(std::chrono::milliseconds)>;

class LlmClient {
public:
    LlmClient(LlmConfig config, std::shared_ptr<Transport> transport, Sleeper sleeper = {});

    const LlmConfig& config() const noexcept { return config_; }

    // One request, retried with exponential backoff on transient failures.
    LlmResponse translate(std::string_view query);

private:
    LlmResponse attempt(const HttpRequest& request);

    LlmConfig config_;
    std::shared_ptr<Transport> transport_;
    Sleeper sleeper_;
    std::mutex in_flight_;
};

LlmResponse translate_remote(const LlmConfig& config, Transport& transport, std::string_view query);

struct BatchOptions {
    std::string system = "llm";
    // Records are appended here as they complete; existing records are
    // reused so an interrupted run resumes where it stopped.
    std::optional<std::filesystem::path> progress_file;
};

// Sequential translation of every sample. Per-item failures become failed
// records with an empty prediction; AuthError aborts the batch.
std::vector<PredictionRecord> batch_translate(LlmClient& client, const std::vector<Sample>& samples,
                                              const BatchOptions& options = {});

} // namespace geocmd
