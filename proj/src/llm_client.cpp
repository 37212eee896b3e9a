#include "geocmd/llm_client.hpp"

#include <json.hpp>

#ifdef GEOCMD_HAVE_HTTPLIB
#include <httplib.h>
#endif

#include <cstdlib>
#include <fstream>
#include <map>
#include <thread>

namespace geocmd {

namespace {

using json = nlohmann::json;

constexpr std::string_view kPromptHead =
    "You are an expert system that translates user queries into geospatial function calls. "
    "Here are some examples:\n"
    "User: I'd like to zoom out by 2 levels\n"
    "Function Call: ZoomOut(2)\n"
    "User: Show the seismic activity map from WMS URL <https://example.activity/wms>\n"
    "Function Call: AddWMS('https://example.activity/wms')\n"
    "User: Load the point vector using point_zones_NY_kpn.kml!\n"
    "Function Call: AddVector('point', 'point_zones_NY_kpn.kml')\n"
    "User: Add marker 'University' at location -73.1888, 122.889!\n"
    "Function Call: AddMarker('University', [-73.1888, 122.889])\n"
    "User: Set map bounds from 62.2585, -120.3652 to 63.8833, -3.3906.\n"
    "Function Call: MoveToExtent(62.2585, -120.3652, 63.8833, -3.3906)\n"
    "User: Switch to the OpenMallMap layer for retail therapy.\n"
    "Function Call: AddLayer('OpenMallMap')\n"
    "User: Can we go to 40.5267, -79.4892?\n"
    "Function Call: Move(40.5267, -79.4892)\n"
    "User: Draw a Line on the map!\n"
    "Function Call: Draw('Line')\n"
    "User: Set the background color to ivory.\n"
    "Function Call: Cartography('background', 'ivory', null)\n"
    "User: Zoom in by 7 levels to focus on the details.\n"
    "Function Call: ZoomIn(7)\n"
    "User: ";

constexpr std::string_view kPromptTail = "\nFunction Call:";

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(b, e - b + 1);
}

std::optional<std::uint64_t> uint_at(const json& j, std::initializer_list<const char*> path) {
    const json* cur = &j;
    for (const char* key : path) {
        if (!cur->is_object() || !cur->contains(key)) return std::nullopt;
        cur = &(*cur)[key];
    }
    if (!cur->is_number()) return std::nullopt;
    return cur->get<std::uint64_t>();
}

// Text of a content field that is either a string or a list of blocks.
std::optional<std::string> content_text(const json& content) {
    if (content.is_string()) return content.get<std::string>();
    if (!content.is_array()) return std::nullopt;
    std::string out;
    bool any = false;
    for (const json& block : content)
        if (block.is_object() && block.contains("text") && block["text"].is_string()) {
            out += block["text"].get<std::string>();
            any = true;
        }
    return any ? std::optional<std::string>(out) : std::nullopt;
}

struct UrlParts {
    std::string origin; // scheme://host[:port]
    std::string path;
};

UrlParts split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw LlmError(LlmErrorKind::TransportError, "endpoint URL has no scheme: " + url, false);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

std::string_view to_string(LlmErrorKind kind) noexcept {
    switch (kind) {
    case LlmErrorKind::AuthError: return "AuthError";
    case LlmErrorKind::RateLimited: return "RateLimited";
    case LlmErrorKind::Timeout: return "Timeout";
    case LlmErrorKind::TransportError: return "TransportError";
    case LlmErrorKind::EmptyCompletion: return "EmptyCompletion";
    }
    return "LlmError";
}

LlmError::LlmError(LlmErrorKind kind, const std::string& message, bool retryable)
    : Error(std::string(to_string(kind)), message), kind_(kind), retryable_(retryable) {}

LlmConfig LlmConfig::from_environment(std::string endpoint_url, std::string model_name) {
    const char* key = std::getenv(std::string(kApiKeyEnv).c_str());
    if (key == nullptr || *key == '\0')
        throw LlmError(LlmErrorKind::AuthError, std::string(kApiKeyEnv) + " is not set", false);
    LlmConfig config;
    config.endpoint_url = std::move(endpoint_url);
    config.model_name = std::move(model_name);
    config.api_key = key;
    return config;
}

std::string build_prompt(std::string_view query) {
    std::string prompt;
    prompt.reserve(kPromptHead.size() + query.size() + kPromptTail.size());
    prompt += kPromptHead;
    prompt += query;
    prompt += kPromptTail;
    return prompt;
}

std::string build_request_body(const LlmConfig& config, std::string_view prompt) {
    nlohmann::ordered_json body;
    body["model"] = config.model_name;
    body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = config.temperature;
    body["max_tokens"] = config.max_tokens;
    body["stream"] = false;
    return body.dump();
}

std::string extract_completion_text(std::string_view response_body) {
    json j;
    try {
        j = json::parse(response_body);
    } catch (const json::exception& e) {
        throw LlmError(LlmErrorKind::TransportError, std::string("response is not JSON: ") + e.what(), false);
    }
    if (j.is_object()) {
        if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
            const json& c = j["choices"][0];
            if (c.contains("message") && c["message"].contains("content"))
                if (auto t = content_text(c["message"]["content"])) return *t;
            if (c.contains("text") && c["text"].is_string()) return c["text"].get<std::string>();
        }
        if (j.contains("message") && j["message"].is_object() && j["message"].contains("content"))
            if (auto t = content_text(j["message"]["content"])) return *t;
        if (j.contains("text") && j["text"].is_string()) return j["text"].get<std::string>();
        if (j.contains("generations") && j["generations"].is_array() && !j["generations"].empty() &&
            j["generations"][0].contains("text"))
            return j["generations"][0]["text"].get<std::string>();
        if (j.contains("content"))
            if (auto t = content_text(j["content"])) return *t;
    }
    throw LlmError(LlmErrorKind::TransportError, "unrecognized response envelope", false);
}

std::string extract_call(std::string_view raw_text) {
    std::string_view s = raw_text;
    const auto start = s.find_first_not_of(" \t\r\n\f\v");
    if (start == std::string_view::npos) return {};
    s.remove_prefix(start);
    if (const auto nl = s.find('\n'); nl != std::string_view::npos) s = s.substr(0, nl);
    s = trim(s);
    while (s.substr(0, kCompletionAnchor.size()) == kCompletionAnchor) {
        s.remove_prefix(kCompletionAnchor.size());
        s = trim(s);
    }
    return std::string(s);
}

HttpResponse HttpTransport::post(const HttpRequest& request) {
#ifdef GEOCMD_HAVE_HTTPLIB
    const UrlParts url = split_url(request.url);
    httplib::Client client(url.origin);
    const auto timeout = std::chrono::milliseconds(request.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [k, v] : request.headers) {
        if (k == "Content-Type") content_type = v;
        else headers.emplace(k, v);
    }
    const auto result = client.Post(url.path, headers, request.body, content_type);
    if (!result) {
        const auto err = result.error();
        const bool timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
        throw LlmError(timed_out ? LlmErrorKind::Timeout : LlmErrorKind::TransportError,
                       "request to " + request.url + " failed: " + httplib::to_string(err), true);
    }
    return HttpResponse{result->status, result->body};
#else
    (void)split_url;
    throw LlmError(LlmErrorKind::TransportError, "built without HTTP support: " + request.url, false);
#endif
}

LlmClient::LlmClient(LlmConfig config, std::shared_ptr<Transport> transport, Sleeper sleeper)
    : config_(std::move(config)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

LlmResponse LlmClient::attempt(const HttpRequest& request) {
    const HttpResponse res = transport_->post(request);
    if (res.status == 401 || res.status == 403)
        throw LlmError(LlmErrorKind::AuthError, "endpoint rejected credentials (HTTP " + std::to_string(res.status) + ")",
                       false);
    if (res.status == 429) throw LlmError(LlmErrorKind::RateLimited, "rate limited (HTTP 429)", true);
    if (res.status == 408 || res.status == 504)
        throw LlmError(LlmErrorKind::Timeout, "upstream timeout (HTTP " + std::to_string(res.status) + ")", true);
    if (res.status >= 500)
        throw LlmError(LlmErrorKind::TransportError, "server error (HTTP " + std::to_string(res.status) + ")", true);
    if (res.status < 200 || res.status >= 300)
        throw LlmError(LlmErrorKind::TransportError, "unexpected HTTP " + std::to_string(res.status), false);

    LlmResponse out;
    out.raw_text = extract_completion_text(res.body);
    out.extracted_call = extract_call(out.raw_text);
    if (out.extracted_call.empty()) throw LlmError(LlmErrorKind::EmptyCompletion, "model returned no call", false);
    try {
        const json j = json::parse(res.body);
        out.prompt_tokens = uint_at(j, {"usage", "prompt_tokens"});
        if (!out.prompt_tokens) out.prompt_tokens = uint_at(j, {"usage", "tokens", "input_tokens"});
        out.completion_tokens = uint_at(j, {"usage", "completion_tokens"});
        if (!out.completion_tokens) out.completion_tokens = uint_at(j, {"usage", "tokens", "output_tokens"});
    } catch (const json::exception&) {
    }
    return out;
}

LlmResponse LlmClient::translate(std::string_view query) {
    std::lock_guard lock(in_flight_);
    if (config_.api_key.empty()) throw LlmError(LlmErrorKind::AuthError, "no API key configured", false);

    HttpRequest request;
    request.url = config_.endpoint_url;
    request.headers = {{"Authorization", "Bearer " + config_.api_key},
                       {"Content-Type", "application/json"},
                       {"Accept", "application/json"}};
    request.body = build_request_body(config_, build_prompt(query));
    request.timeout_ms = config_.timeout_ms;

    const auto started = std::chrono::steady_clock::now();
    std::uint32_t attempts = 0;
    for (;;) {
        ++attempts;
        try {
            LlmResponse out = attempt(request);
            out.attempts = attempts;
            out.latency_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
            return out;
        } catch (const LlmError& e) {
            if (!e.retryable() || attempts > config_.max_retries) throw;
            const std::uint64_t delay = static_cast<std::uint64_t>(config_.backoff_initial_ms) << (attempts - 1);
            sleeper_(std::chrono::milliseconds(delay));
        }
    }
}

LlmResponse translate_remote(const LlmConfig& config, Transport& transport, std::string_view query) {
    // Non-owning view of the caller's transport.
    LlmClient client(config, std::shared_ptr<Transport>(&transport, [](Transport*) {}));
    return client.translate(query);
}

std::vector<PredictionRecord> batch_translate(LlmClient& client, const std::vector<Sample>& samples,
                                              const BatchOptions& options) {
    std::map<std::uint64_t, PredictionRecord> done;
    if (options.progress_file && std::filesystem::exists(*options.progress_file))
        for (auto& r : load_predictions(*options.progress_file))
            if (r.system == options.system) done.emplace(r.id, std::move(r));

    std::ofstream progress;
    if (options.progress_file) {
        progress.open(*options.progress_file, std::ios::binary | std::ios::app);
        if (!progress) throw PredictionFileError("cannot append to " + options.progress_file->string());
    }

    std::vector<PredictionRecord> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) {
        if (auto it = done.find(s.id); it != done.end()) {
            out.push_back(it->second);
            continue;
        }
        PredictionRecord r;
        r.id = s.id;
        r.system = options.system;
        r.kind = PredictionKind::Generation;
        r.query = s.query;
        r.reference = s.call;
        try {
            r.prediction = client.translate(s.query).extracted_call;
        } catch (const LlmError& e) {
            if (e.kind() == LlmErrorKind::AuthError) throw;
            r.failed = true;
            r.error = std::string(to_string(e.kind())) + ": " + e.what();
        }
        if (progress.is_open()) {
            progress << to_jsonl_line(r) << '\n';
            progress.flush();
        }
        done.emplace(r.id, r);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace geocmd
