// Retrieval micro-benchmark: serial reference scan vs the OpenMP scoring
// kernel on a synthetic index, with a result-equality check.

#include "cwescout/vectordb.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <vector>

using namespace cwescout;

namespace {

VectorIndex make_index(int entries, int dim, std::mt19937& rng) {
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    VectorIndex index;
    index.dim = dim;
    index.provider_fingerprint = "bench/v0";
    index.entries.reserve(static_cast<size_t>(entries));
    for (int i = 0; i < entries; ++i) {
        EmbeddingVector v;
        v.values.reserve(static_cast<size_t>(dim));
        for (int d = 0; d < dim; ++d) v.values.push_back(dist(rng));
        index.entries.push_back({i, std::move(v)});
    }
    return index;
}

template <typename Fn>
double time_ms(Fn&& fn, int repeats) {
    auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(end - start).count() / repeats;
}

} // namespace

int main(int argc, char** argv) {
    int entries = 200000;
    int dim = 128;
    int queries = 20;
    int k = 5;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (std::strcmp(argv[i], "--entries") == 0) entries = std::atoi(argv[i + 1]);
        else if (std::strcmp(argv[i], "--dim") == 0) dim = std::atoi(argv[i + 1]);
        else if (std::strcmp(argv[i], "--queries") == 0) queries = std::atoi(argv[i + 1]);
        else if (std::strcmp(argv[i], "--k") == 0) k = std::atoi(argv[i + 1]);
    }

    std::mt19937 rng(2024);
    auto index = make_index(entries, dim, rng);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    std::vector<EmbeddingVector> query_set;
    for (int q = 0; q < queries; ++q) {
        EmbeddingVector v;
        for (int d = 0; d < dim; ++d) v.values.push_back(dist(rng) + 0.001f);
        query_set.push_back(std::move(v));
    }

#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    std::printf("index: %d entries x dim %d, top-%d, %d queries, %d thread(s)\n", entries, dim, k,
                queries, threads);

    // correctness first: both paths must agree on every query
    for (const auto& q : query_set) {
        auto par = query_top_k(index, q, k, "bench/v0");
        auto ser = query_top_k_serial(index, q, k, "bench/v0");
        if (par.size() != ser.size()) {
            std::fprintf(stderr, "result size mismatch\n");
            return 1;
        }
        for (size_t i = 0; i < par.size(); ++i) {
            if (par[i].chunk_id != ser[i].chunk_id || par[i].score != ser[i].score) {
                std::fprintf(stderr, "result mismatch at rank %zu\n", i + 1);
                return 1;
            }
        }
    }

    size_t qi = 0;
    auto next_query = [&]() -> const EmbeddingVector& {
        const auto& q = query_set[qi];
        qi = (qi + 1) % query_set.size();
        return q;
    };

    double serial_ms = time_ms([&] { query_top_k_serial(index, next_query(), k, "bench/v0"); },
                               queries);
    double parallel_ms = time_ms([&] { query_top_k(index, next_query(), k, "bench/v0"); },
                                 queries);

    std::printf("%-22s %10.3f ms/query\n", "serial reference", serial_ms);
    std::printf("%-22s %10.3f ms/query\n", "openmp kernel", parallel_ms);
    std::printf("%-22s %10.2fx\n", "speedup", serial_ms / parallel_ms);
    return 0;
}
