#include "cwescout/embedder.hpp"

#include "cwescout/error.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>

namespace cwescout {

namespace {

uint64_t fnv1a64(std::string_view token) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : token) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// cpp-httplib wants the endpoint split into host part and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
    size_t scheme = url.find("://");
    size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    size_t path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

TokenHashEmbedder::TokenHashEmbedder(int dim) : dim_(dim) {
    if (dim < 1) throw Error(Errc::Config, "embedder dim must be >= 1");
}

EmbeddingVector TokenHashEmbedder::embed_one(const std::string& text) const {
    EmbeddingVector vec;
    vec.values.assign(static_cast<size_t>(dim_), 0.0f);
    size_t start = std::string::npos;
    auto flush = [&](size_t end) {
        if (start == std::string::npos) return;
        std::string token = text.substr(start, end - start);
        for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        vec.values[fnv1a64(token) % static_cast<uint64_t>(dim_)] += 1.0f;
        start = std::string::npos;
    };
    for (size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isalnum(c) || c == '_') {
            if (start == std::string::npos) start = i;
        } else {
            flush(i);
        }
    }
    flush(text.size());

    double norm = 0.0;
    for (float v : vec.values) norm += static_cast<double>(v) * v;
    if (norm > 0.0) {
        float inv = static_cast<float>(1.0 / std::sqrt(norm));
        for (float& v : vec.values) v *= inv;
    }
    return vec;
}

std::vector<EmbeddingVector> TokenHashEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out(texts.size());
    const int64_t n = static_cast<int64_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t i = 0; i < n; ++i) {
        out[static_cast<size_t>(i)] = embed_one(texts[static_cast<size_t>(i)]);
    }
    return out;
}

std::string TokenHashEmbedder::fingerprint() const {
    return "token-hash/v1/dim=" + std::to_string(dim_);
}

HttpEmbedder::HttpEmbedder(std::string url, std::string model, int dim)
    : url_(std::move(url)), model_(std::move(model)), dim_(dim) {
    if (url_.empty()) throw Error(Errc::Config, "embedder URL is empty");
    if (dim_ < 1) throw Error(Errc::Config, "embedder dim must be >= 1");
}

HttpEmbedder::~HttpEmbedder() = default;

std::vector<EmbeddingVector> HttpEmbedder::embed(const std::vector<std::string>& texts) {
    auto [host, path] = split_url(url_);
    httplib::Client client(host);
    client.set_read_timeout(120, 0);

    std::vector<EmbeddingVector> out(texts.size());
    constexpr size_t kBatch = 64;
    for (size_t offset = 0; offset < texts.size(); offset += kBatch) {
        size_t count = std::min(kBatch, texts.size() - offset);
        nlohmann::json request;
        request["model"] = model_;
        request["input"] = std::vector<std::string>(texts.begin() + static_cast<long>(offset),
                                                    texts.begin() + static_cast<long>(offset + count));
        auto res = client.Post(path, request.dump(), "application/json");
        if (!res) throw Error(Errc::ProviderFailure, "embedding request failed: no response");
        if (res->status != 200) {
            throw Error(Errc::ProviderFailure,
                        "embedding request failed: HTTP " + std::to_string(res->status));
        }
        nlohmann::json body = nlohmann::json::parse(res->body, nullptr, false);
        if (body.is_discarded() || !body.contains("data") || !body["data"].is_array()) {
            throw Error(Errc::ProviderFailure, "malformed embeddings response");
        }
        for (const auto& item : body["data"]) {
            if (!item.contains("index") || !item.contains("embedding")) {
                throw Error(Errc::ProviderFailure, "malformed embeddings response entry");
            }
            size_t idx = item["index"].get<size_t>();
            if (idx >= count) throw Error(Errc::ProviderFailure, "embedding index out of range");
            EmbeddingVector vec;
            vec.values = item["embedding"].get<std::vector<float>>();
            if (vec.dim() != dim_) {
                throw Error(Errc::ProviderFailure, "embedding dim " + std::to_string(vec.dim()) +
                                                       ", expected " + std::to_string(dim_));
            }
            out[offset + idx] = std::move(vec);
        }
    }
    return out;
}

std::string HttpEmbedder::fingerprint() const {
    return "http/" + model_ + "/dim=" + std::to_string(dim_);
}

} // namespace cwescout
