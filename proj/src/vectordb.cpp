#include "cwescout/vectordb.hpp"

#include "cwescout/corpus.hpp"
#include "cwescout/embedder.hpp"
#include "cwescout/error.hpp"
#include "cwescout/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace cwescout {

namespace {

constexpr char kIndexMagic[] = "CWESCOUT-IDX"; // 12 bytes, no terminator stored
constexpr uint32_t kIndexVersion = 1;

double dot_and_norms(const EmbeddingVector& a, const EmbeddingVector& b, double& norm_a,
                     double& norm_b) {
    double dot = 0.0;
    norm_a = 0.0;
    norm_b = 0.0;
    const float* pa = a.values.data();
    const float* pb = b.values.data();
    size_t n = a.values.size();
    for (size_t i = 0; i < n; ++i) {
        dot += static_cast<double>(pa[i]) * pb[i];
        norm_a += static_cast<double>(pa[i]) * pa[i];
        norm_b += static_cast<double>(pb[i]) * pb[i];
    }
    return dot;
}

// Score of one entry against the query; NaN marks unrankable (zero norm).
double entry_score(const EmbeddingVector& entry, const EmbeddingVector& query, double query_norm) {
    double dot = 0.0, norm_e = 0.0;
    const float* pe = entry.values.data();
    const float* pq = query.values.data();
    size_t n = entry.values.size();
    for (size_t i = 0; i < n; ++i) {
        dot += static_cast<double>(pe[i]) * pq[i];
        norm_e += static_cast<double>(pe[i]) * pe[i];
    }
    if (norm_e == 0.0) return std::nan("");
    return std::clamp(dot / (std::sqrt(norm_e) * query_norm), -1.0, 1.0);
}

void check_query(const VectorIndex& index, const EmbeddingVector& query, int k,
                 std::string_view query_fingerprint, double& query_norm) {
    if (query_fingerprint != index.provider_fingerprint) {
        throw Error(Errc::FingerprintMismatch,
                    "index built with '" + index.provider_fingerprint + "', query from '" +
                        std::string(query_fingerprint) + "'");
    }
    if (query.dim() != index.dim) {
        throw Error(Errc::DimensionMismatch, "query dim " + std::to_string(query.dim()) +
                                                 " vs index dim " + std::to_string(index.dim));
    }
    if (k < 1) throw Error(Errc::PreconditionViolation, "k must be >= 1");
    double norm = 0.0;
    for (float v : query.values) norm += static_cast<double>(v) * v;
    if (norm == 0.0) throw Error(Errc::ZeroVector, "query vector has zero norm");
    query_norm = std::sqrt(norm);
}

std::vector<RetrievalHit> select_top_k(std::vector<RetrievalHit>& scored, int k) {
    auto better = [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    };
    size_t take = std::min<size_t>(static_cast<size_t>(k), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<long>(take), scored.end(), better);
    scored.resize(take);
    for (size_t i = 0; i < scored.size(); ++i) scored[i].rank = static_cast<int>(i) + 1;
    return scored;
}

} // namespace

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw Error(Errc::DimensionMismatch,
                    std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
    double norm_a = 0.0, norm_b = 0.0;
    double dot = dot_and_norms(a, b, norm_a, norm_b);
    if (norm_a == 0.0 || norm_b == 0.0) {
        throw Error(Errc::ZeroVector, "cosine of a zero vector is undefined");
    }
    return std::clamp(dot / (std::sqrt(norm_a) * std::sqrt(norm_b)), -1.0, 1.0);
}

VectorIndex build_index(const std::vector<Chunk>& chunks, EmbeddingProvider& provider) {
    if (chunks.empty()) throw Error(Errc::EmptyCorpus, "cannot index zero chunks");

    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& c : chunks) texts.push_back(c.text);

    std::vector<EmbeddingVector> vectors;
    try {
        vectors = provider.embed(texts);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(Errc::ProviderFailure, e.what());
    }
    if (vectors.size() != chunks.size()) {
        throw Error(Errc::ProviderFailure,
                    "provider returned " + std::to_string(vectors.size()) + " vectors for " +
                        std::to_string(chunks.size()) + " chunks");
    }

    VectorIndex index;
    index.dim = provider.dim();
    index.provider_fingerprint = provider.fingerprint();
    index.entries.reserve(chunks.size());
    for (size_t i = 0; i < chunks.size(); ++i) {
        if (vectors[i].dim() != index.dim) {
            throw Error(Errc::ProviderFailure,
                        "vector dim " + std::to_string(vectors[i].dim()) + " for chunk " +
                            std::to_string(chunks[i].chunk_id) + ", expected " +
                            std::to_string(index.dim));
        }
        for (float v : vectors[i].values) {
            if (!std::isfinite(v)) {
                throw Error(Errc::ProviderFailure, "non-finite embedding value for chunk " +
                                                       std::to_string(chunks[i].chunk_id));
            }
        }
        index.entries.push_back({chunks[i].chunk_id, std::move(vectors[i])});
    }
    std::sort(index.entries.begin(), index.entries.end(),
              [](const IndexEntry& a, const IndexEntry& b) { return a.chunk_id < b.chunk_id; });
    for (size_t i = 1; i < index.entries.size(); ++i) {
        if (index.entries[i].chunk_id == index.entries[i - 1].chunk_id) {
            throw Error(Errc::PreconditionViolation,
                        "duplicate chunk_id " + std::to_string(index.entries[i].chunk_id));
        }
    }
    return index;
}

std::vector<RetrievalHit> query_top_k(const VectorIndex& index, const EmbeddingVector& query,
                                      int k, std::string_view query_fingerprint) {
    double query_norm = 0.0;
    check_query(index, query, k, query_fingerprint, query_norm);

    const int64_t n = static_cast<int64_t>(index.entries.size());
    std::vector<double> scores(static_cast<size_t>(n));
    // Per-entry arithmetic is independent; only the loop over entries is
    // parallel, so scores are bit-identical to the serial path.
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
        scores[static_cast<size_t>(i)] =
            entry_score(index.entries[static_cast<size_t>(i)].vector, query, query_norm);
    }

    std::vector<RetrievalHit> scored;
    scored.reserve(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        double s = scores[static_cast<size_t>(i)];
        if (std::isnan(s)) continue;
        scored.push_back({index.entries[static_cast<size_t>(i)].chunk_id, s, 0});
    }
    return select_top_k(scored, k);
}

std::vector<RetrievalHit> query_top_k_serial(const VectorIndex& index, const EmbeddingVector& query,
                                             int k, std::string_view query_fingerprint) {
    double query_norm = 0.0;
    check_query(index, query, k, query_fingerprint, query_norm);

    std::vector<RetrievalHit> scored;
    scored.reserve(index.entries.size());
    for (const auto& entry : index.entries) {
        double s = entry_score(entry.vector, query, query_norm);
        if (std::isnan(s)) continue;
        scored.push_back({entry.chunk_id, s, 0});
    }
    std::sort(scored.begin(), scored.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    if (scored.size() > static_cast<size_t>(k)) scored.resize(static_cast<size_t>(k));
    for (size_t i = 0; i < scored.size(); ++i) scored[i].rank = static_cast<int>(i) + 1;
    return scored;
}

namespace {

template <typename T>
void put_le(std::string& out, T value) {
    for (size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>((static_cast<uint64_t>(value) >> (8 * i)) & 0xff));
    }
}

template <typename T>
T get_le(std::string_view bytes, size_t& pos) {
    if (pos + sizeof(T) > bytes.size()) throw Error(Errc::BadIndexFile, "truncated index file");
    uint64_t v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    }
    pos += sizeof(T);
    return static_cast<T>(v);
}

} // namespace

std::string serialize_index(const VectorIndex& index) {
    std::string out;
    out.append(kIndexMagic, 12);
    put_le<uint32_t>(out, kIndexVersion);
    put_le<uint32_t>(out, static_cast<uint32_t>(index.dim));
    put_le<uint64_t>(out, index.entries.size());
    put_le<uint32_t>(out, static_cast<uint32_t>(index.provider_fingerprint.size()));
    out += index.provider_fingerprint;
    for (const auto& entry : index.entries) {
        put_le<int64_t>(out, entry.chunk_id);
        for (float v : entry.vector.values) {
            uint32_t bits;
            std::memcpy(&bits, &v, sizeof(bits));
            put_le<uint32_t>(out, bits);
        }
    }
    return out;
}

VectorIndex deserialize_index(std::string_view bytes) {
    if (bytes.size() < 12 || bytes.substr(0, 12) != std::string_view(kIndexMagic, 12)) {
        throw Error(Errc::BadIndexFile, "bad magic");
    }
    size_t pos = 12;
    uint32_t version = get_le<uint32_t>(bytes, pos);
    if (version != kIndexVersion) {
        throw Error(Errc::BadIndexFile, "unsupported version " + std::to_string(version));
    }
    VectorIndex index;
    index.dim = static_cast<int>(get_le<uint32_t>(bytes, pos));
    uint64_t count = get_le<uint64_t>(bytes, pos);
    uint32_t fp_len = get_le<uint32_t>(bytes, pos);
    if (pos + fp_len > bytes.size()) throw Error(Errc::BadIndexFile, "truncated fingerprint");
    index.provider_fingerprint = std::string(bytes.substr(pos, fp_len));
    pos += fp_len;
    index.entries.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        IndexEntry entry;
        entry.chunk_id = get_le<int64_t>(bytes, pos);
        entry.vector.values.resize(static_cast<size_t>(index.dim));
        for (int d = 0; d < index.dim; ++d) {
            uint32_t bits = get_le<uint32_t>(bytes, pos);
            float v;
            std::memcpy(&v, &bits, sizeof(v));
            entry.vector.values[static_cast<size_t>(d)] = v;
        }
        index.entries.push_back(std::move(entry));
    }
    if (pos != bytes.size()) throw Error(Errc::BadIndexFile, "trailing bytes");
    return index;
}

void save_index(const VectorIndex& index, const std::string& path) {
    util::write_file(path, serialize_index(index));
}

VectorIndex load_index(const std::string& path) {
    return deserialize_index(util::read_file(path));
}

} // namespace cwescout
