#include "narrator/llm.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "narrator/errors.hpp"
#include "narrator/sha256.hpp"

namespace narrator {

using nlohmann::json;

namespace {

constexpr const char* kProviderNames[4] = {"openai", "gemini", "anthropic", "mock"};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

int hex_value(char c) { return c <= '9' ? c - '0' : c - 'a' + 10; }

// -- mock ------------------------------------------------------------------

std::map<std::string, std::string> load_mock_table(const std::string& path) {
    std::map<std::string, std::string> table;
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open mock fixture table '" + path + "'");
    const auto base = std::filesystem::path(path).parent_path();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw IoFailure("mock fixture line lacks a tab: '" + line + "'");
        std::filesystem::path reply = line.substr(tab + 1);
        if (reply.is_relative()) reply = base / reply;
        table[line.substr(0, tab)] = reply.string();
    }
    return table;
}

std::string mock_complete(const PromptBundle& prompt, const ProviderConfig& cfg) {
    const std::string digest = sha256_hex(prompt.text);
    if (!cfg.mock_fixtures.empty()) {
        const auto table = load_mock_table(cfg.mock_fixtures);
        auto it = table.find(digest);
        if (it != table.end()) {
            std::ifstream reply(it->second, std::ios::binary);
            if (!reply) throw IoFailure("mock reply file missing: '" + it->second + "'");
            std::ostringstream buf;
            buf << reply.rdbuf();
            return buf.str();
        }
    }
    // No fixture: synthesize a deterministic, parseable reply from the hash.
    switch (prompt.kind) {
        case PromptKind::WeeklyDass: {
            DassPrediction p;
            p.depression = static_cast<DassSeverity>(hex_value(digest[0]) % 5);
            p.anxiety = static_cast<DassSeverity>(hex_value(digest[1]) % 5);
            p.stress = static_cast<DassSeverity>(hex_value(digest[2]) % 5);
            return format_dass(p);
        }
        case PromptKind::WeeklyPanas: {
            PanasScores s;
            for (std::size_t i = 0; i < s.values.size(); ++i)
                s.values[i] = 1 + hex_value(digest[i]) % 5;
            return format_panas(s);
        }
        case PromptKind::DailySummary:
            return "Mock summary " + digest.substr(0, 12) + ".";
        case PromptKind::DailyQuestion:
            return "Mock answer " + digest.substr(0, 12) + ".";
    }
    return "Mock reply " + digest.substr(0, 12) + ".";
}

// -- http ----------------------------------------------------------------

struct Endpoint {
    std::string host;  // scheme://host[:port], as httplib wants it
    std::string prefix;
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("endpoint '" + url + "' must include a scheme");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url.rfind("https://", 0) == 0)
        throw ConfigError("this build lacks TLS support; use an http:// endpoint");
#endif
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    if (prefix == "/") prefix.clear();
    return {url.substr(0, path_start), prefix};
}

}  // namespace

const char* provider_name(ProviderKind kind) { return kProviderNames[static_cast<int>(kind)]; }

std::optional<ProviderKind> provider_from_name(const std::string& name) {
    const std::string n = lower(name);
    for (int i = 0; i < 4; ++i)
        if (n == kProviderNames[i]) return static_cast<ProviderKind>(i);
    return std::nullopt;
}

HttpRequest build_provider_request(const ProviderConfig& cfg, const std::string& prompt_text) {
    HttpRequest req;
    switch (cfg.provider) {
        case ProviderKind::OpenAI: {
            req.path = "/v1/chat/completions";
            req.headers = {{"Authorization", "Bearer " + cfg.api_key}};
            req.body = json{{"model", cfg.model},
                            {"messages", json::array({{{"role", "user"},
                                                       {"content", prompt_text}}})}}
                           .dump();
            break;
        }
        case ProviderKind::Anthropic: {
            req.path = "/v1/messages";
            req.headers = {{"x-api-key", cfg.api_key}, {"anthropic-version", "2023-06-01"}};
            req.body = json{{"model", cfg.model},
                            {"max_tokens", 4096},
                            {"messages", json::array({{{"role", "user"},
                                                       {"content", prompt_text}}})}}
                           .dump();
            break;
        }
        case ProviderKind::Gemini: {
            req.path = "/v1beta/models/" + cfg.model + ":generateContent?key=" + cfg.api_key;
            req.body =
                json{{"contents", json::array({{{"parts", json::array({{{"text", prompt_text}}})}}})}}
                    .dump();
            break;
        }
        case ProviderKind::Mock:
            throw ConfigError("mock provider has no wire format");
    }
    return req;
}

std::string extract_completion(ProviderKind kind, const std::string& response_body) {
    json j;
    try {
        j = json::parse(response_body);
    } catch (const json::exception& e) {
        throw MalformedProviderResponse(std::string("reply is not JSON: ") + e.what());
    }
    try {
        switch (kind) {
            case ProviderKind::OpenAI:
                return j.at("choices").at(0).at("message").at("content").get<std::string>();
            case ProviderKind::Anthropic:
                return j.at("content").at(0).at("text").get<std::string>();
            case ProviderKind::Gemini:
                return j.at("candidates")
                    .at(0)
                    .at("content")
                    .at("parts")
                    .at(0)
                    .at("text")
                    .get<std::string>();
            case ProviderKind::Mock:
                break;
        }
    } catch (const json::exception& e) {
        throw MalformedProviderResponse(std::string("reply shape unexpected: ") + e.what());
    }
    throw MalformedProviderResponse("mock provider has no wire format");
}

RateLimiter::RateLimiter() {
    now_ = [] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
            .count();
    };
    sleep_ = [](double seconds) {
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    };
}

RateLimiter& RateLimiter::instance() {
    static RateLimiter limiter;
    return limiter;
}

void RateLimiter::configure(int requests_per_minute) {
    std::lock_guard lock(mutex_);
    if (rpm_ == requests_per_minute) return;
    rpm_ = requests_per_minute;
    tokens_ = 1.0;
    last_refill_ = now_();
}

void RateLimiter::set_clock(std::function<double()> now, std::function<void(double)> sleep) {
    std::lock_guard lock(mutex_);
    now_ = std::move(now);
    sleep_ = std::move(sleep);
}

void RateLimiter::acquire() {
    std::unique_lock lock(mutex_);
    if (rpm_ <= 0) return;
    const double rate = rpm_ / 60.0;
    while (true) {
        const double now = now_();
        tokens_ = std::min(1.0, tokens_ + (now - last_refill_) * rate);
        last_refill_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const double wait = (1.0 - tokens_) / rate;
        auto sleep = sleep_;
        lock.unlock();
        sleep(wait);
        lock.lock();
    }
}

std::string complete(const PromptBundle& prompt, const ProviderConfig& cfg) {
    if (prompt.text.empty()) throw Error("prompt must be non-empty");
    if (cfg.timeout_s <= 0) throw ConfigError("timeout_s must be positive");

    if (cfg.provider == ProviderKind::Mock) return mock_complete(prompt, cfg);

    if (cfg.endpoint.empty()) throw ConfigError("provider endpoint not configured");
    const Endpoint endpoint = split_endpoint(cfg.endpoint);
    const HttpRequest req = build_provider_request(cfg, prompt.text);

    RateLimiter::instance().configure(cfg.requests_per_minute);

    std::string last_error = "request failed";
    bool rate_limited = false;
    for (int attempt = 0; attempt <= std::max(0, cfg.max_retries); ++attempt) {
        if (attempt > 0) {
            const double delay = cfg.backoff_s * static_cast<double>(1 << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        RateLimiter::instance().acquire();

        httplib::Client client(endpoint.host);
        client.set_connection_timeout(std::chrono::duration<double>(cfg.timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(cfg.timeout_s));
        client.set_write_timeout(std::chrono::duration<double>(cfg.timeout_s));

        httplib::Headers headers(req.headers.begin(), req.headers.end());
        auto res = client.Post(endpoint.prefix + req.path, headers, req.body, "application/json");
        if (!res) {
            last_error = "no response from " + endpoint.host + " (" +
                         httplib::to_string(res.error()) + ")";
            rate_limited = false;
            continue;
        }
        if (res->status == 200) return extract_completion(cfg.provider, res->body);
        if (res->status == 401 || res->status == 403)
            throw AuthFailure("provider rejected credentials (HTTP " +
                              std::to_string(res->status) + ")");
        if (res->status == 429) {
            last_error = "rate limited (HTTP 429)";
            rate_limited = true;
            continue;
        }
        if (res->status >= 500) {
            last_error = "provider error (HTTP " + std::to_string(res->status) + ")";
            rate_limited = false;
            continue;
        }
        throw ProviderError("unexpected HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    if (rate_limited) throw RateLimited(last_error + " after retries");
    throw Timeout(last_error + " after retries");
}

namespace {

const std::regex& severity_pattern(const std::string& label) {
    static std::map<std::string, std::regex> cache;
    static std::mutex cache_mutex;
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(label);
    if (it == cache.end()) {
        // Label, a short run of separators, then a severity. "Extremely
        // Severe" is listed first so plain "Severe" cannot shadow it.
        it = cache
                 .emplace(label,
                          std::regex(label +
                                         "[^A-Za-z0-9\\n]{0,10}(extremely[\\s*_-]+severe|severe|"
                                         "moderate|mild|normal)\\b",
                                     std::regex::icase))
                 .first;
    }
    return it->second;
}

DassSeverity severity_from_text(std::string value) {
    value = lower(value);
    if (value.rfind("extremely", 0) == 0) return DassSeverity::ExtremelySevere;
    if (value == "severe") return DassSeverity::Severe;
    if (value == "moderate") return DassSeverity::Moderate;
    if (value == "mild") return DassSeverity::Mild;
    return DassSeverity::Normal;
}

DassSeverity extract_severity(const std::string& text, const std::string& label) {
    std::smatch match;
    if (std::regex_search(text, match, severity_pattern(label)))
        return severity_from_text(match[1].str());
    if (std::regex_search(text, std::regex(label, std::regex::icase)))
        throw UnknownSeverity("subscale '" + label + "' present but its severity is unreadable");
    throw MissingSubscale("subscale '" + label + "' not found in reply");
}

}  // namespace

std::optional<std::size_t> panas_affect_index(const std::string& name) {
    const std::string n = lower(name);
    for (std::size_t i = 0; i < 10; ++i)
        if (n == lower(kPanasAffects[i])) return i;
    return std::nullopt;
}

DassPrediction parse_dass_response(const std::string& text) {
    DassPrediction p;
    p.depression = extract_severity(text, "depression");
    p.anxiety = extract_severity(text, "anxiety");
    p.stress = extract_severity(text, "stress");
    return p;
}

PanasScores parse_panas_response(const std::string& text) {
    PanasScores scores;
    std::optional<std::string> missing;
    for (std::size_t i = 0; i < 10; ++i) {
        const std::string affect = lower(kPanasAffects[i]);
        const std::regex pattern("\\b" + affect + "\\b[^A-Za-z0-9\\n]{0,10}(-?\\d+)",
                                 std::regex::icase);
        std::smatch match;
        if (!std::regex_search(text, match, pattern)) {
            if (!missing) missing = affect;
            continue;
        }
        const int value = std::stoi(match[1].str());
        // An out-of-range score outranks a missing affect elsewhere.
        if (value < 1 || value > 5)
            throw OutOfRangeScore("affect '" + affect + "' scored " + std::to_string(value) +
                                  ", outside 1..5");
        scores.values[i] = value;
    }
    if (missing) throw MissingAffect("affect '" + *missing + "' not found in reply");
    return scores;
}

std::string format_dass(const DassPrediction& prediction) {
    return std::string("Depression: ") + severity_name(prediction.depression) +
           "\nAnxiety: " + severity_name(prediction.anxiety) +
           "\nStress: " + severity_name(prediction.stress);
}

std::string format_panas(const PanasScores& scores) {
    std::string out;
    for (std::size_t i = 0; i < 10; ++i) {
        if (i) out += '\n';
        out += kPanasAffects[i];
        out += ": ";
        out += std::to_string(scores.values[i]);
    }
    return out;
}

}  // namespace narrator
