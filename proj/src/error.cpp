#include "cwescout/error.hpp"

namespace cwescout {

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::RootNotFound: return "RootNotFound";
        case Errc::NoFilesMatched: return "NoFilesMatched";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::ZeroVector: return "ZeroVector";
        case Errc::EmptyCorpus: return "EmptyCorpus";
        case Errc::ProviderFailure: return "ProviderFailure";
        case Errc::FingerprintMismatch: return "FingerprintMismatch";
        case Errc::BadIndexFile: return "BadIndexFile";
        case Errc::Transport: return "Transport";
        case Errc::RateLimited: return "RateLimited";
        case Errc::ProviderRefusal: return "ProviderRefusal";
        case Errc::CassetteMismatch: return "CassetteMismatch";
        case Errc::CassetteExhausted: return "CassetteExhausted";
        case Errc::NoStructuredBlock: return "NoStructuredBlock";
        case Errc::MalformedBlock: return "MalformedBlock";
        case Errc::AgentOutputUnusable: return "AgentOutputUnusable";
        case Errc::DatasetNotFound: return "DatasetNotFound";
        case Errc::EmptyDataset: return "EmptyDataset";
        case Errc::DuplicateId: return "DuplicateId";
        case Errc::EmptySamples: return "EmptySamples";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::PreconditionViolation: return "PreconditionViolation";
        case Errc::Io: return "Io";
        case Errc::Config: return "Config";
    }
    return "UnknownError";
}

} // namespace cwescout
