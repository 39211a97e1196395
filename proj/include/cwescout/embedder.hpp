#pragma once

#include "cwescout/vectordb.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cwescout {

/// Pluggable text embedder. Implementations must be deterministic per
/// fingerprint: the same text always maps to the same vector.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    /// Embeds a batch; one vector per input, all of dim().
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;

    virtual int dim() const = 0;

    /// Identifies the embedder and its version. Indexes built with one
    /// fingerprint reject queries embedded with another.
    virtual std::string fingerprint() const = 0;
};

/// Deterministic offline embedder: lowercase word tokens hashed into a
/// fixed-dim bag-of-words vector, L2-normalized. A test double for running
/// the pipeline with zero network access, not a claim of semantic quality.
class TokenHashEmbedder final : public EmbeddingProvider {
public:
    explicit TokenHashEmbedder(int dim = 256);

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    int dim() const override { return dim_; }
    std::string fingerprint() const override;

    /// Single-text kernel, exposed for the serial/parallel parity tests.
    EmbeddingVector embed_one(const std::string& text) const;

private:
    int dim_;
};

/// Embedder speaking the embeddings wire interface:
///   request  {"model": ..., "input": [...]}
///   response {"data": [{"index": i, "embedding": [...]}]}
/// The endpoint URL comes from config or CWESCOUT_EMBED_URL.
class HttpEmbedder final : public EmbeddingProvider {
public:
    HttpEmbedder(std::string url, std::string model, int dim);
    ~HttpEmbedder() override;

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    int dim() const override { return dim_; }
    std::string fingerprint() const override;

private:
    std::string url_;
    std::string model_;
    int dim_;
};

} // namespace cwescout
