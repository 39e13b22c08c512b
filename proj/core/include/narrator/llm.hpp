#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "narrator/prompts.hpp"

namespace narrator {

enum class ProviderKind { OpenAI, Gemini, Anthropic, Mock };

const char* provider_name(ProviderKind kind);
std::optional<ProviderKind> provider_from_name(const std::string& name);

struct ProviderConfig {
    ProviderKind provider = ProviderKind::Mock;
    std::string endpoint;  // base URL, e.g. https://api.openai.com
    std::string model;
    std::string api_key;  // never serialized into logs or outputs
    double timeout_s = 30.0;
    int max_retries = 2;
    double backoff_s = 0.5;          // base delay, doubled per retry
    int requests_per_minute = 0;     // 0 = unlimited
    std::string mock_fixtures;       // optional prompt_sha256<TAB>reply_path table
};

// Sends one prompt and returns the provider's text completion. Transient
// failures (connect errors, timeouts, 429, 5xx) retry with exponential
// backoff up to max_retries; auth and malformed responses fail fast.
// The Mock provider resolves offline: fixture table first, then a
// deterministic reply derived from the prompt hash and kind.
std::string complete(const PromptBundle& prompt, const ProviderConfig& cfg);

// Wire-format pieces kept pure so adapters are testable without a network.
struct HttpRequest {
    std::string path;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;  // JSON
};

HttpRequest build_provider_request(const ProviderConfig& cfg, const std::string& prompt_text);
std::string extract_completion(ProviderKind kind, const std::string& response_body);

// Process-wide token bucket; capacity one token so bursts serialize to the
// configured sustained rate.
class RateLimiter {
public:
    static RateLimiter& instance();

    void configure(int requests_per_minute);
    void acquire();

    // Test hooks: monotonic clock in seconds and a sleep function.
    void set_clock(std::function<double()> now, std::function<void(double)> sleep);

private:
    RateLimiter();

    std::mutex mutex_;
    int rpm_ = 0;
    double tokens_ = 1.0;
    double last_refill_ = 0.0;
    std::function<double()> now_;
    std::function<void(double)> sleep_;
};

struct DassPrediction {
    DassSeverity depression = DassSeverity::Normal;
    DassSeverity anxiety = DassSeverity::Normal;
    DassSeverity stress = DassSeverity::Normal;

    bool operator==(const DassPrediction&) const = default;
};

// Ten affect scores in kPanasAffects order, each in [1, 5].
struct PanasScores {
    std::array<int, 10> values{};

    int& operator[](std::size_t i) { return values[i]; }
    int operator[](std::size_t i) const { return values[i]; }
    bool operator==(const PanasScores&) const = default;
};

std::optional<std::size_t> panas_affect_index(const std::string& name);  // case-insensitive

// Lenient extraction of "Depression/Anxiety/Stress: <extent>" from a reply
// that may wrap the format in prose. "Extremely Severe" wins over "Severe".
DassPrediction parse_dass_response(const std::string& text);

// Lenient extraction of "<affect>[:\s]+<integer>" for all ten affects.
PanasScores parse_panas_response(const std::string& text);

// Canonical reply shapes; parse_*(format_*(x)) == x.
std::string format_dass(const DassPrediction& prediction);
std::string format_panas(const PanasScores& scores);

}  // namespace narrator
