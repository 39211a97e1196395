#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cwescout {

struct Chunk;
class EmbeddingProvider;

/// Fixed-length finite real vector.
struct EmbeddingVector {
    std::vector<float> values;

    int dim() const { return static_cast<int>(values.size()); }
};

struct IndexEntry {
    int64_t chunk_id = 0;
    EmbeddingVector vector;
};

/// Immutable exact-scan vector index. Entries are ordered by chunk_id and
/// queries must carry the fingerprint of the provider that embedded them.
struct VectorIndex {
    int dim = 0;
    std::string provider_fingerprint;
    std::vector<IndexEntry> entries; // ordered by chunk_id, ids unique
};

struct RetrievalHit {
    int64_t chunk_id = 0;
    double score = 0.0; // cosine similarity in [-1, 1]
    int rank = 0;       // 1-based
};

/// Cosine similarity dot(a,b)/(|a||b|), clamped to [-1, 1] against rounding.
/// Throws DimensionMismatch and ZeroVector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Embeds every chunk and assembles the index. A provider failure aborts
/// the build; no partial index escapes. Throws EmptyCorpus, ProviderFailure.
VectorIndex build_index(const std::vector<Chunk>& chunks, EmbeddingProvider& provider);

/// The k highest-cosine entries (fewer if the index is smaller), ordered by
/// (score desc, chunk_id asc). Zero-norm stored entries are unrankable and
/// skipped. OpenMP-parallel scoring kernel.
/// Throws FingerprintMismatch, ZeroVector, DimensionMismatch.
std::vector<RetrievalHit> query_top_k(const VectorIndex& index, const EmbeddingVector& query,
                                      int k, std::string_view query_fingerprint);

/// Serial reference for query_top_k: full scan + stable sort, no OpenMP.
/// Kept for the parity tests and the retrieval benchmark.
std::vector<RetrievalHit> query_top_k_serial(const VectorIndex& index, const EmbeddingVector& query,
                                             int k, std::string_view query_fingerprint);

/// Binary index file, bit-exact across runs:
///   magic "CWESCOUT-IDX" | u32 version | u32 dim | u64 entry count |
///   u32 fingerprint length | fingerprint bytes |
///   per entry: i64 chunk_id | dim little-endian float32
std::string serialize_index(const VectorIndex& index);
VectorIndex deserialize_index(std::string_view bytes);

void save_index(const VectorIndex& index, const std::string& path);
VectorIndex load_index(const std::string& path);

} // namespace cwescout
