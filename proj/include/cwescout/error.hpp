#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cwescout {

/// Error codes carried by every cwescout::Error. Each value maps to one
/// failure mode named in the module contracts.
enum class Errc {
    // corpus
    RootNotFound,
    NoFilesMatched,
    // vectordb
    DimensionMismatch,
    ZeroVector,
    EmptyCorpus,
    ProviderFailure,
    FingerprintMismatch,
    BadIndexFile,
    // llm
    Transport,
    RateLimited,
    ProviderRefusal,
    CassetteMismatch,
    CassetteExhausted,
    NoStructuredBlock,
    MalformedBlock,
    // agents
    AgentOutputUnusable,
    // eval
    DatasetNotFound,
    EmptyDataset,
    DuplicateId,
    EmptySamples,
    EmptyInput,
    // generic
    PreconditionViolation,
    Io,
    Config,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace cwescout
