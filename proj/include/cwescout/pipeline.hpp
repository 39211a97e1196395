#pragma once

#include "cwescout/agents.hpp"
#include "cwescout/embedder.hpp"
#include "cwescout/vectordb.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace cwescout {

enum class StopReason { Approved, MaxIterations };

std::string_view stop_reason_name(StopReason reason);

struct DebateIteration {
    std::vector<CandidateCwe> candidates;
    ReviewVerdict verdict;
};

struct DebateRecord {
    std::vector<DebateIteration> iterations;
    StopReason stop_reason = StopReason::Approved;
};

struct StepTimings {
    std::chrono::milliseconds step1{0};
    std::chrono::milliseconds step2{0};
    std::chrono::milliseconds step3{0};
};

/// Full pipeline output for one function under review.
struct ScanReport {
    std::string function_text;
    std::string function_sha256;
    bool context_free = false;
    bool degraded = false;
    bool single_agent = false;
    std::string template_hash;
    std::string llm_fingerprint;
    std::string embedder_fingerprint; // empty when context-free

    std::vector<CandidateCwe> candidates; // ranked (probability desc, id asc)
    DebateRecord debate;
    std::vector<ContextRequirement> requirements;
    std::vector<ContextQuestion> questions;
    std::vector<ContextAnswer> answers;
    std::vector<AuditDecision> decisions; // one per candidate
    std::vector<std::string> warnings;

    // wall-clock only; deliberately outside the serialized contract so
    // record and replay runs produce identical report files
    StepTimings timings;

    std::vector<const AuditDecision*> confirmed() const;
    int confirmed_count() const;
    int rejected_count() const;
    int defaulted_count() const;

    /// Canonical deterministic serialization (stable key order, floats at
    /// 6 decimals) — the contract for all golden tests.
    std::string serialize() const;
    static ScanReport deserialize(std::string_view bytes);

    /// Report files are named <function-hash-prefix>.report.
    std::string report_filename() const;
};

struct PipelineConfig {
    int max_debate_iterations = 5;
    int k_retrieval = 5;
    bool single_agent = false;
    int candidate_warn_threshold = 30;
    GenerationParams params;
};

/// Retrieval inputs; all null for a context-free scan.
struct ScanInputs {
    const VectorIndex* index = nullptr;
    const std::vector<Chunk>* chunks = nullptr;
    EmbeddingProvider* embedder = nullptr;

    bool has_context() const { return index && chunks && embedder; }
};

/// Debate loop: lister then reviewer until APPROVE or the iteration cap.
/// Returns the canonical final candidate list, ranked.
std::pair<std::vector<CandidateCwe>, DebateRecord> step1_list_candidates(
    agents::AgentContext& ctx, const std::string& function_text, int max_iterations,
    bool single_agent);

struct Step2Output {
    std::vector<ContextRequirement> requirements;
    std::vector<ContextQuestion> questions;
    std::vector<ContextAnswer> answers;
    bool failed = false; // fully failed step 2 -> scan continues DEGRADED
};

Step2Output step2_build_context(agents::AgentContext& ctx, const std::string& function_text,
                                const std::vector<CandidateCwe>& candidates,
                                const ScanInputs& inputs, int k_retrieval);

std::vector<AuditDecision> step3_audit(agents::AgentContext& ctx, const std::string& function_text,
                                       const std::vector<CandidateCwe>& candidates,
                                       const std::vector<ContextAnswer>& answers, bool& degraded);

/// End-to-end scan of one function. Throws only on unrecoverable aborts
/// (unusable lister output, replay integrity violations).
ScanReport scan(ChatProvider& chat, const std::string& function_text, const ScanInputs& inputs,
                const PipelineConfig& config);

} // namespace cwescout
