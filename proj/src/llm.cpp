#include "cwescout/llm.hpp"

#include "cwescout/error.hpp"

#include <httplib.h>

#include <chrono>
#include <random>
#include <thread>

namespace cwescout {

util::ordered_json canonical_request(const std::vector<ChatMessage>& messages,
                                     const GenerationParams& params) {
    util::ordered_json req;
    req["model"] = params.model;
    req["temperature"] = params.temperature;
    if (params.max_tokens) req["max_tokens"] = *params.max_tokens;
    if (params.seed) req["seed"] = *params.seed;
    util::ordered_json msgs = util::ordered_json::array();
    for (const auto& m : messages) {
        util::ordered_json jm;
        jm["role"] = m.role;
        jm["content"] = m.content;
        msgs.push_back(std::move(jm));
    }
    req["messages"] = std::move(msgs);
    return req;
}

std::string request_hash(const std::vector<ChatMessage>& messages, const GenerationParams& params) {
    return util::sha256_hex(util::dump_deterministic(canonical_request(messages, params)));
}

// ---------------------------------------------------------------------------
// Transcript / cassette
// ---------------------------------------------------------------------------

std::string Transcript::serialize() const {
    util::ordered_json doc;
    doc["schema"] = "cwescout.cassette/1";
    doc["provider_fingerprint"] = provider_fingerprint;
    util::ordered_json records = util::ordered_json::array();
    for (const auto& e : entries) {
        util::ordered_json rec;
        rec["call_id"] = e.call_id;
        rec["request_hash"] = e.req_hash;
        rec["request"] = e.request;
        rec["response_text"] = e.response_text;
        records.push_back(std::move(rec));
    }
    doc["records"] = std::move(records);
    return util::dump_deterministic(doc);
}

Transcript Transcript::deserialize(std::string_view bytes) {
    auto doc = util::ordered_json::parse(bytes, nullptr, false);
    if (doc.is_discarded() || doc.value("schema", "") != "cwescout.cassette/1") {
        throw Error(Errc::Io, "not a cwescout cassette");
    }
    Transcript t;
    t.provider_fingerprint = doc.value("provider_fingerprint", "");
    for (const auto& rec : doc["records"]) {
        TranscriptEntry e;
        e.call_id = rec.at("call_id").get<int>();
        e.req_hash = rec.at("request_hash").get<std::string>();
        e.request = rec.at("request");
        e.response_text = rec.at("response_text").get<std::string>();
        t.entries.push_back(std::move(e));
    }
    for (size_t i = 0; i < t.entries.size(); ++i) {
        if (t.entries[i].call_id != static_cast<int>(i)) {
            throw Error(Errc::Io, "cassette call_ids are not dense from 0");
        }
    }
    return t;
}

void Transcript::save(const std::string& path) const { util::write_file(path, serialize()); }

Transcript Transcript::load(const std::string& path) {
    return deserialize(util::read_file(path));
}

// ---------------------------------------------------------------------------
// HTTP provider
// ---------------------------------------------------------------------------

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
    size_t scheme = url.find("://");
    size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    size_t path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

HttpChatProvider::HttpChatProvider(std::string url, std::string api_key)
    : url_(std::move(url)), api_key_(std::move(api_key)) {
    if (url_.empty()) {
        throw Error(Errc::Config, "LLM endpoint URL is empty (set CWESCOUT_LLM_URL)");
    }
    sleep_ms_ = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
}

std::string HttpChatProvider::complete(const std::vector<ChatMessage>& messages,
                                       const GenerationParams& params) {
    if (messages.empty()) throw Error(Errc::PreconditionViolation, "empty message list");

    auto [host, path] = split_url(url_);
    std::string body = canonical_request(messages, params).dump();

    std::mt19937 jitter_rng(std::random_device{}());
    const int max_attempts = 3;
    for (int attempt = 1;; ++attempt) {
        httplib::Client client(host);
        client.set_read_timeout(300, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        auto res = client.Post(path, headers, body, "application/json");
        std::string failure;
        if (!res) {
            failure = "transport failure";
        } else if (res->status == 429 || res->status >= 500) {
            failure = "HTTP " + std::to_string(res->status);
        } else if (res->status != 200) {
            throw Error(Errc::ProviderRefusal, "HTTP " + std::to_string(res->status));
        } else {
            auto doc = nlohmann::json::parse(res->body, nullptr, false);
            if (!doc.is_discarded() && doc.contains("choices") && !doc["choices"].empty()) {
                const auto& choice = doc["choices"][0];
                if (choice.contains("message") && choice["message"].contains("content")) {
                    return choice["message"]["content"].get<std::string>();
                }
            }
            throw Error(Errc::Transport, "malformed chat response body");
        }
        if (attempt >= max_attempts) {
            throw Error(res && res->status == 429 ? Errc::RateLimited : Errc::Transport,
                        failure + " after " + std::to_string(attempt) + " attempts");
        }
        int backoff = 250 * (1 << (attempt - 1));
        backoff += static_cast<int>(jitter_rng() % 100u);
        sleep_ms_(backoff);
    }
}

std::string HttpChatProvider::fingerprint() const { return "http-chat/v1"; }

// ---------------------------------------------------------------------------
// Recording / replay
// ---------------------------------------------------------------------------

RecordingProvider::RecordingProvider(ChatProvider& inner) : inner_(inner) {
    transcript_.provider_fingerprint = inner.fingerprint();
}

std::string RecordingProvider::complete(const std::vector<ChatMessage>& messages,
                                        const GenerationParams& params) {
    std::string response = inner_.complete(messages, params);
    std::lock_guard<std::mutex> lock(mutex_);
    TranscriptEntry entry;
    entry.call_id = static_cast<int>(transcript_.entries.size());
    entry.req_hash = request_hash(messages, params);
    entry.request = canonical_request(messages, params);
    entry.response_text = response;
    transcript_.entries.push_back(std::move(entry));
    return response;
}

ReplayProvider::ReplayProvider(Transcript transcript) : transcript_(std::move(transcript)) {}

ReplayProvider ReplayProvider::from_file(const std::string& path) {
    return ReplayProvider(Transcript::load(path));
}

std::string ReplayProvider::complete(const std::vector<ChatMessage>& messages,
                                     const GenerationParams& params) {
    if (cursor_ >= transcript_.entries.size()) {
        throw Error(Errc::CassetteExhausted,
                    "call " + std::to_string(cursor_) + " beyond cassette end");
    }
    const auto& entry = transcript_.entries[cursor_];
    std::string hash = request_hash(messages, params);
    if (hash != entry.req_hash) {
        throw Error(Errc::CassetteMismatch, "call " + std::to_string(cursor_) +
                                                ": request hash " + hash.substr(0, 12) +
                                                " != recorded " + entry.req_hash.substr(0, 12));
    }
    ++cursor_;
    return entry.response_text;
}

void ScriptedHashProvider::add(const std::vector<ChatMessage>& messages,
                               const GenerationParams& params, std::string response) {
    responses_[request_hash(messages, params)] = std::move(response);
}

std::string ScriptedHashProvider::complete(const std::vector<ChatMessage>& messages,
                                           const GenerationParams& params) {
    auto it = responses_.find(request_hash(messages, params));
    if (it == responses_.end()) throw Error(Errc::Transport, "no scripted response for request");
    return it->second;
}

// ---------------------------------------------------------------------------
// Structured output extraction
// ---------------------------------------------------------------------------

nlohmann::json extract_structured_block(const std::string& text) {
    bool saw_brace = false;
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') continue;
        saw_brace = true;
        // string-aware balance scan to the matching close brace
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (size_t j = i; j < text.size(); ++j) {
            char c = text[j];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) {
                    auto candidate = text.substr(i, j - i + 1);
                    auto parsed = nlohmann::json::parse(candidate, nullptr, false);
                    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
                    break; // try the next opening brace
                }
            }
        }
    }
    if (!saw_brace) throw Error(Errc::NoStructuredBlock, "no object found in model output");
    throw Error(Errc::MalformedBlock, "braces present but no well-formed object parses");
}

} // namespace cwescout
