#pragma once

#include "cwescout/corpus.hpp"
#include "cwescout/llm.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cwescout {

/// One hypothesized weakness from the lister.
struct CandidateCwe {
    std::string cwe_id; // normalized "CWE-<digits>", no leading zeros
    std::string title;
    double probability = 0.0; // in [0, 1]
    std::string justification;
};

struct MissingCwe {
    std::string cwe_id;
    std::string title;
    std::string hint;
};

struct ReviewVerdict {
    bool approve = false;
    std::vector<MissingCwe> missing; // empty when approve
    std::string raw_text;            // fed back to the lister on REJECT
};

enum class Criticality { Low, Medium, High, Critical };

std::string_view criticality_name(Criticality level);

/// One piece of external information needed to judge a candidate.
struct ContextRequirement {
    std::string cwe_id;
    std::string context;
    bool available = false;
    Criticality criticality = Criticality::Low;
    std::string reason;
};

struct ContextQuestion {
    std::string question;
    std::string reason;
    std::vector<std::string> source_cwe_ids;
};

struct ContextAnswer {
    std::string question;
    std::string answer;
    std::vector<int64_t> supporting_chunk_ids;
};

struct AuditDecision {
    std::string cwe_id;
    std::string title;
    bool confirmed = false;
    std::string justification;
    bool defaulted = false; // auditor omitted this candidate; fail-closed
};

struct ScoredChunk {
    Chunk chunk;
    double score = 0.0;
};

// ---------------------------------------------------------------------------
// CWE id normalization
// ---------------------------------------------------------------------------

/// Maps raw model ids onto canonical "CWE-<n>" form (case-insensitive,
/// leading zeros stripped). Compound ids like "CWE-259/798" yield multiple
/// entries. Returns empty when no id can be extracted.
std::vector<std::string> normalize_cwe_id(const std::string& raw);

/// Numeric part of a normalized id, for ranking tie-breaks.
long cwe_number(const std::string& normalized_id);

/// Ranks by (probability desc, numeric id asc).
void rank_candidates(std::vector<CandidateCwe>& candidates);

// ---------------------------------------------------------------------------
// Prompt rendering
// ---------------------------------------------------------------------------

namespace agents {

/// Substitutes {name} placeholders and unescapes {{ }} to literal braces.
/// Unknown single-brace placeholders are a programming error.
std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& vars);

std::string lister_prompt(const std::string& function_text);
std::string reviewer_system_prompt();
std::string reviewer_payload(const std::string& function_text,
                             const std::vector<CandidateCwe>& candidates);
std::string context_extractor_prompt(const std::string& function_text, const CandidateCwe& cand);
std::string query_agent_prompt(const std::string& function_text,
                               const std::vector<ContextRequirement>& requirements);
std::string context_synthesizer_prompt(const std::string& function_text, const ContextQuestion& q,
                                       const std::vector<ScoredChunk>& hits);
std::string security_auditor_prompt(const std::string& function_text,
                                    const std::vector<CandidateCwe>& candidates,
                                    const std::vector<ContextAnswer>& answers);

/// Auditor {contexts} payload: "Q: ...\nA: ..." blocks in question order.
std::string contexts_payload(const std::vector<ContextAnswer>& answers);

/// sha256 over all six templates; embedded in every report.
std::string template_hash();

/// Follow-up sent once when an agent's output fails to parse.
extern const std::string kRepairInstruction;

// ---------------------------------------------------------------------------
// Parsers (total: valid value or declared error, never a crash)
// ---------------------------------------------------------------------------

/// Lister output -> validated, normalized, deduplicated candidates.
/// Throws AgentOutputUnusable when no usable candidate list exists.
std::vector<CandidateCwe> parse_lister(const std::string& text, std::vector<std::string>* warnings);

/// Reviewer output -> verdict. Throws AgentOutputUnusable when no VERDICT
/// line is present.
ReviewVerdict parse_reviewer(const std::string& text);

/// ContextExtractor output for one candidate. Entries violating the
/// criticality enum are dropped with a warning.
std::vector<ContextRequirement> parse_context_extractor(const std::string& text,
                                                        const std::string& cwe_id,
                                                        std::vector<std::string>* warnings);

/// QueryAgent output -> deduplicated questions attributed to candidates.
std::vector<ContextQuestion> parse_query_agent(const std::string& text,
                                               const std::vector<std::string>& all_cwe_ids);

/// Auditor output -> decisions for the given candidates; omitted candidates
/// are defaulted to confirmed (fail-closed) with a warning.
std::vector<AuditDecision> parse_security_auditor(const std::string& text,
                                                  const std::vector<CandidateCwe>& candidates,
                                                  std::vector<std::string>* warnings);

/// Deduplicates by normalized question text, merging source ids.
std::vector<ContextQuestion> dedupe_questions(std::vector<ContextQuestion> questions);

// ---------------------------------------------------------------------------
// Agent runners (prompt -> completion -> parse, with one repair round)
// ---------------------------------------------------------------------------

struct AgentContext {
    ChatProvider& chat;
    GenerationParams params;
    std::vector<std::string>* warnings = nullptr; // optional sink
    int* call_count = nullptr;                    // optional call counter
};

/// Runs the lister over an explicit conversation (the debate transcript so
/// far); appends the assistant turns it produces. Throws AgentOutputUnusable
/// after the single repair attempt fails.
std::vector<CandidateCwe> run_lister(AgentContext& ctx, std::vector<ChatMessage>& conversation);

/// Fail-open: unusable output is treated as APPROVE with a warning.
ReviewVerdict run_reviewer(AgentContext& ctx, const std::string& function_text,
                           const std::vector<CandidateCwe>& candidates);

/// Unusable output yields an empty requirement list with a warning.
std::vector<ContextRequirement> run_context_extractor(AgentContext& ctx,
                                                      const std::string& function_text,
                                                      const CandidateCwe& candidate);

/// Unusable output falls back to one literal question per requirement.
std::vector<ContextQuestion> run_query_agent(AgentContext& ctx, const std::string& function_text,
                                             const std::vector<ContextRequirement>& requirements,
                                             const std::vector<std::string>& all_cwe_ids);

/// Unusable output yields the "NO CONTEXT AVAILABLE" sentinel answer.
ContextAnswer run_context_synthesizer(AgentContext& ctx, const std::string& function_text,
                                      const ContextQuestion& question,
                                      const std::vector<ScoredChunk>& hits);

/// Fail-closed: unusable output confirms all candidates and sets `degraded`.
std::vector<AuditDecision> run_security_auditor(AgentContext& ctx,
                                                const std::string& function_text,
                                                const std::vector<CandidateCwe>& candidates,
                                                const std::vector<ContextAnswer>& answers,
                                                bool& degraded);

} // namespace agents
} // namespace cwescout
