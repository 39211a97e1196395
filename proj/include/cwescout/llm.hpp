#pragma once

#include "cwescout/util.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cwescout {

struct ChatMessage {
    std::string role; // system | user | assistant
    std::string content;
};

struct GenerationParams {
    std::string model = "gpt-4o";
    double temperature = 0.0;
    std::optional<int> max_tokens;
    std::optional<int> seed;
};

/// Canonical JSON form of one request; its sha256 is the replay-matching key.
/// Authorization material never appears here, so cassettes are redacted by
/// construction.
util::ordered_json canonical_request(const std::vector<ChatMessage>& messages,
                                     const GenerationParams& params);
std::string request_hash(const std::vector<ChatMessage>& messages, const GenerationParams& params);

struct TranscriptEntry {
    int call_id = 0;
    std::string req_hash;
    util::ordered_json request;
    std::string response_text;
};

/// Ordered, append-only record of completed calls. Serialized form is a
/// cassette, replayable via ReplayProvider.
struct Transcript {
    std::string provider_fingerprint;
    std::vector<TranscriptEntry> entries;

    std::string serialize() const;
    static Transcript deserialize(std::string_view bytes);
    void save(const std::string& path) const;
    static Transcript load(const std::string& path);
};

/// Chat-completion provider interface.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;

    /// Returns the assistant text. Throws Transport, RateLimited (after
    /// retries), ProviderRefusal, CassetteMismatch, CassetteExhausted.
    virtual std::string complete(const std::vector<ChatMessage>& messages,
                                 const GenerationParams& params) = 0;

    virtual std::string fingerprint() const = 0;
};

/// Provider speaking the chat wire interface (request {model, messages,
/// temperature, ...}; response.choices[0].message.content). Endpoint and
/// key come from CWESCOUT_LLM_URL / CWESCOUT_LLM_KEY or config. Transient
/// failures retry up to 3 attempts with jittered exponential backoff.
class HttpChatProvider final : public ChatProvider {
public:
    HttpChatProvider(std::string url, std::string api_key);

    std::string complete(const std::vector<ChatMessage>& messages,
                         const GenerationParams& params) override;
    std::string fingerprint() const override;

    /// Test seam: replaces the inter-retry sleep.
    void set_sleeper(std::function<void(int)> sleep_ms) { sleep_ms_ = std::move(sleep_ms); }

private:
    std::string url_;
    std::string api_key_;
    std::function<void(int)> sleep_ms_;
};

/// Wraps another provider and appends every completed call to a transcript.
class RecordingProvider final : public ChatProvider {
public:
    explicit RecordingProvider(ChatProvider& inner);

    std::string complete(const std::vector<ChatMessage>& messages,
                         const GenerationParams& params) override;
    std::string fingerprint() const override { return inner_.fingerprint(); }

    const Transcript& transcript() const { return transcript_; }
    void save(const std::string& path) const { transcript_.save(path); }

private:
    ChatProvider& inner_;
    Transcript transcript_;
    std::mutex mutex_;
};

/// Replays a transcript strictly in order: each call must hash-match the
/// next entry or the replay fails with CassetteMismatch.
class ReplayProvider final : public ChatProvider {
public:
    explicit ReplayProvider(Transcript transcript);
    static ReplayProvider from_file(const std::string& path);

    std::string complete(const std::vector<ChatMessage>& messages,
                         const GenerationParams& params) override;
    std::string fingerprint() const override { return transcript_.provider_fingerprint; }

    bool exhausted() const { return cursor_ == transcript_.entries.size(); }

private:
    Transcript transcript_;
    size_t cursor_ = 0;
};

/// Deterministic in-process provider mapping request hash -> canned text.
class ScriptedHashProvider final : public ChatProvider {
public:
    void add(const std::vector<ChatMessage>& messages, const GenerationParams& params,
             std::string response);

    std::string complete(const std::vector<ChatMessage>& messages,
                         const GenerationParams& params) override;
    std::string fingerprint() const override { return "scripted-hash/v1"; }

private:
    std::map<std::string, std::string> responses_;
};

/// Finds the first well-formed JSON object embedded in model text,
/// tolerating surrounding prose and triple-backtick fencing.
/// Throws NoStructuredBlock, MalformedBlock.
nlohmann::json extract_structured_block(const std::string& text);

} // namespace cwescout
