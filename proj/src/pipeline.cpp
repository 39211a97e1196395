#include "cwescout/pipeline.hpp"

#include "cwescout/error.hpp"
#include "cwescout/util.hpp"

#include <algorithm>
#include <map>

namespace cwescout {

std::string_view stop_reason_name(StopReason reason) {
    return reason == StopReason::Approved ? "APPROVED" : "MAX_ITERATIONS";
}

// ---------------------------------------------------------------------------
// Step 1: candidate debate
// ---------------------------------------------------------------------------

std::pair<std::vector<CandidateCwe>, DebateRecord> step1_list_candidates(
    agents::AgentContext& ctx, const std::string& function_text, int max_iterations,
    bool single_agent) {
    if (util::trim(function_text).empty()) {
        throw Error(Errc::PreconditionViolation, "function text is empty");
    }
    if (max_iterations < 1) {
        throw Error(Errc::PreconditionViolation, "max_iterations must be >= 1");
    }

    DebateRecord debate;
    std::vector<ChatMessage> conversation = {{"user", agents::lister_prompt(function_text)}};
    std::vector<CandidateCwe> final_candidates;
    std::vector<std::vector<CandidateCwe>> parsed_iterations;

    for (int iteration = 1; iteration <= max_iterations; ++iteration) {
        std::vector<CandidateCwe> candidates;
        try {
            candidates = agents::run_lister(ctx, conversation);
        } catch (const Error& e) {
            if (iteration == 1 || e.code() != Errc::AgentOutputUnusable) throw;
            // a failed refinement falls back to the union of the parsed
            // iterations, max probability per id
            if (ctx.warnings) {
                ctx.warnings->push_back(
                    "lister: refinement unusable at iteration " + std::to_string(iteration) +
                    ", using union of prior iterations");
            }
            std::map<std::string, CandidateCwe> merged;
            for (const auto& iter : parsed_iterations) {
                for (const auto& cand : iter) {
                    auto it = merged.find(cand.cwe_id);
                    if (it == merged.end() || cand.probability > it->second.probability) {
                        merged[cand.cwe_id] = cand;
                    }
                }
            }
            final_candidates.clear();
            for (auto& [id, cand] : merged) final_candidates.push_back(std::move(cand));
            debate.stop_reason = StopReason::MaxIterations;
            rank_candidates(final_candidates);
            return {final_candidates, debate};
        }
        parsed_iterations.push_back(candidates);
        final_candidates = candidates;

        DebateIteration record;
        record.candidates = candidates;

        if (single_agent) {
            // no reviewer arm; the single pass stands approved
            record.verdict.approve = true;
            debate.iterations.push_back(std::move(record));
            debate.stop_reason = StopReason::Approved;
            break;
        }

        ReviewVerdict verdict = agents::run_reviewer(ctx, function_text, candidates);
        record.verdict = verdict;
        debate.iterations.push_back(std::move(record));

        if (verdict.approve) {
            debate.stop_reason = StopReason::Approved;
            break;
        }
        debate.stop_reason = StopReason::MaxIterations;
        if (iteration < max_iterations) {
            // the reviewer's feedback (missing CWEs + self-reflect
            // instruction) becomes the next lister turn
            conversation.push_back({"user", verdict.raw_text});
        }
    }

    rank_candidates(final_candidates);
    return {final_candidates, debate};
}

// ---------------------------------------------------------------------------
// Step 2: context retrieval
// ---------------------------------------------------------------------------

namespace {

const Chunk* find_chunk(const std::vector<Chunk>& chunks, int64_t chunk_id) {
    auto it = std::lower_bound(chunks.begin(), chunks.end(), chunk_id,
                               [](const Chunk& c, int64_t id) { return c.chunk_id < id; });
    if (it != chunks.end() && it->chunk_id == chunk_id) return &*it;
    return nullptr;
}

} // namespace

Step2Output step2_build_context(agents::AgentContext& ctx, const std::string& function_text,
                                const std::vector<CandidateCwe>& candidates,
                                const ScanInputs& inputs, int k_retrieval) {
    Step2Output out;
    if (candidates.empty()) return out;

    try {
        for (const auto& cand : candidates) {
            auto reqs = agents::run_context_extractor(ctx, function_text, cand);
            out.requirements.insert(out.requirements.end(), reqs.begin(), reqs.end());
        }

        // available=true means the information is inside the function itself
        std::vector<ContextRequirement> unavailable;
        for (const auto& req : out.requirements) {
            if (!req.available) unavailable.push_back(req);
        }
        if (unavailable.empty()) return out;

        std::vector<std::string> all_ids;
        for (const auto& cand : candidates) all_ids.push_back(cand.cwe_id);
        out.questions = agents::run_query_agent(ctx, function_text, unavailable, all_ids);

        for (const auto& question : out.questions) {
            std::vector<ScoredChunk> hits;
            try {
                EmbeddingVector qvec = inputs.embedder->embed({question.question})[0];
                auto retrieved = query_top_k(*inputs.index, qvec, k_retrieval,
                                             inputs.embedder->fingerprint());
                for (const auto& hit : retrieved) {
                    const Chunk* chunk = find_chunk(*inputs.chunks, hit.chunk_id);
                    if (chunk) hits.push_back({*chunk, hit.score});
                }
            } catch (const Error& e) {
                if (ctx.warnings) {
                    ctx.warnings->push_back("retrieval failed for question '" + question.question +
                                            "': " + e.what());
                }
            }

            if (hits.empty()) {
                ContextAnswer answer;
                answer.question = question.question;
                answer.answer = "NO CONTEXT AVAILABLE";
                out.answers.push_back(std::move(answer));
                if (ctx.warnings) {
                    ctx.warnings->push_back("no chunks retrieved for question '" +
                                            question.question + "'");
                }
                continue;
            }
            out.answers.push_back(
                agents::run_context_synthesizer(ctx, function_text, question, hits));
        }
    } catch (const Error& e) {
        if (e.code() == Errc::CassetteMismatch || e.code() == Errc::CassetteExhausted) throw;
        out.failed = true;
        out.answers.clear();
        if (ctx.warnings) {
            ctx.warnings->push_back(std::string("step 2 failed: ") + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Step 3: audit
// ---------------------------------------------------------------------------

std::vector<AuditDecision> step3_audit(agents::AgentContext& ctx, const std::string& function_text,
                                       const std::vector<CandidateCwe>& candidates,
                                       const std::vector<ContextAnswer>& answers, bool& degraded) {
    return agents::run_security_auditor(ctx, function_text, candidates, answers, degraded);
}

// ---------------------------------------------------------------------------
// Full scan
// ---------------------------------------------------------------------------

ScanReport scan(ChatProvider& chat, const std::string& function_text, const ScanInputs& inputs,
                const PipelineConfig& config) {
    using clock = std::chrono::steady_clock;

    ScanReport report;
    report.function_text = function_text;
    report.function_sha256 = util::sha256_hex(function_text);
    report.single_agent = config.single_agent;
    report.context_free = !inputs.has_context();
    report.template_hash = agents::template_hash();
    report.llm_fingerprint = chat.fingerprint();
    report.embedder_fingerprint = report.context_free ? "" : inputs.embedder->fingerprint();

    agents::AgentContext ctx{chat, config.params, &report.warnings, nullptr};

    auto t0 = clock::now();
    auto [candidates, debate] =
        step1_list_candidates(ctx, function_text, config.max_debate_iterations,
                              config.single_agent);
    report.candidates = candidates;
    report.debate = std::move(debate);
    auto t1 = clock::now();
    report.timings.step1 = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0);

    if (static_cast<int>(candidates.size()) > config.candidate_warn_threshold) {
        report.warnings.push_back("candidate count " + std::to_string(candidates.size()) +
                                  " exceeds " + std::to_string(config.candidate_warn_threshold) +
                                  "; each adds context and audit cost");
    }

    if (!report.context_free && !candidates.empty()) {
        Step2Output step2 =
            step2_build_context(ctx, function_text, candidates, inputs, config.k_retrieval);
        report.requirements = std::move(step2.requirements);
        report.questions = std::move(step2.questions);
        report.answers = std::move(step2.answers);
        if (step2.failed) report.degraded = true;
    }
    auto t2 = clock::now();
    report.timings.step2 = std::chrono::duration_cast<std::chrono::milliseconds>(t2 - t1);

    if (!candidates.empty()) {
        bool degraded = false;
        report.decisions = step3_audit(ctx, function_text, candidates, report.answers, degraded);
        if (degraded) report.degraded = true;
    }
    auto t3 = clock::now();
    report.timings.step3 = std::chrono::duration_cast<std::chrono::milliseconds>(t3 - t2);

    return report;
}

// ---------------------------------------------------------------------------
// Report accessors and serialization
// ---------------------------------------------------------------------------

std::vector<const AuditDecision*> ScanReport::confirmed() const {
    std::vector<const AuditDecision*> out;
    for (const auto& d : decisions) {
        if (d.confirmed) out.push_back(&d);
    }
    return out;
}

int ScanReport::confirmed_count() const {
    return static_cast<int>(std::count_if(decisions.begin(), decisions.end(),
                                          [](const AuditDecision& d) { return d.confirmed; }));
}

int ScanReport::rejected_count() const {
    return static_cast<int>(decisions.size()) - confirmed_count();
}

int ScanReport::defaulted_count() const {
    return static_cast<int>(std::count_if(decisions.begin(), decisions.end(),
                                          [](const AuditDecision& d) { return d.defaulted; }));
}

namespace {

util::ordered_json candidate_to_json(const CandidateCwe& c) {
    util::ordered_json j;
    j["cwe_id"] = c.cwe_id;
    j["title"] = c.title;
    j["probability"] = c.probability;
    j["justification"] = c.justification;
    return j;
}

CandidateCwe candidate_from_json(const util::ordered_json& j) {
    CandidateCwe c;
    c.cwe_id = j.value("cwe_id", "");
    c.title = j.value("title", "");
    c.probability = j.value("probability", 0.0);
    c.justification = j.value("justification", "");
    return c;
}

} // namespace

std::string ScanReport::serialize() const {
    util::ordered_json doc;
    doc["schema"] = "cwescout.report/1";
    doc["function_sha256"] = function_sha256;
    doc["context_free"] = context_free;
    doc["degraded"] = degraded;
    doc["single_agent"] = single_agent;
    doc["template_hash"] = template_hash;
    util::ordered_json fps;
    fps["llm"] = llm_fingerprint;
    fps["embedder"] = embedder_fingerprint;
    doc["provider_fingerprints"] = std::move(fps);
    doc["function_text"] = function_text;

    util::ordered_json cands = util::ordered_json::array();
    for (const auto& c : candidates) cands.push_back(candidate_to_json(c));
    doc["candidates"] = std::move(cands);

    util::ordered_json debate_json;
    debate_json["stop_reason"] = std::string(stop_reason_name(debate.stop_reason));
    util::ordered_json iterations = util::ordered_json::array();
    for (const auto& iter : debate.iterations) {
        util::ordered_json it_json;
        util::ordered_json iter_cands = util::ordered_json::array();
        for (const auto& c : iter.candidates) iter_cands.push_back(candidate_to_json(c));
        it_json["candidates"] = std::move(iter_cands);
        util::ordered_json verdict;
        verdict["verdict"] = iter.verdict.approve ? "APPROVE" : "REJECT";
        util::ordered_json missing = util::ordered_json::array();
        for (const auto& m : iter.verdict.missing) {
            util::ordered_json mj;
            mj["cwe_id"] = m.cwe_id;
            mj["title"] = m.title;
            mj["hint"] = m.hint;
            missing.push_back(std::move(mj));
        }
        verdict["missing"] = std::move(missing);
        it_json["verdict"] = std::move(verdict);
        iterations.push_back(std::move(it_json));
    }
    debate_json["iterations"] = std::move(iterations);
    doc["debate"] = std::move(debate_json);

    util::ordered_json reqs = util::ordered_json::array();
    for (const auto& r : requirements) {
        util::ordered_json rj;
        rj["cwe_id"] = r.cwe_id;
        rj["context"] = r.context;
        rj["available"] = r.available;
        rj["criticality"] = std::string(criticality_name(r.criticality));
        rj["reason"] = r.reason;
        reqs.push_back(std::move(rj));
    }
    doc["requirements"] = std::move(reqs);

    util::ordered_json qs = util::ordered_json::array();
    for (const auto& q : questions) {
        util::ordered_json qj;
        qj["question"] = q.question;
        qj["reason"] = q.reason;
        qj["source_cwe_ids"] = q.source_cwe_ids;
        qs.push_back(std::move(qj));
    }
    doc["questions"] = std::move(qs);

    util::ordered_json ans = util::ordered_json::array();
    for (const auto& a : answers) {
        util::ordered_json aj;
        aj["question"] = a.question;
        aj["answer"] = a.answer;
        aj["supporting_chunk_ids"] = a.supporting_chunk_ids;
        ans.push_back(std::move(aj));
    }
    doc["answers"] = std::move(ans);

    util::ordered_json decs = util::ordered_json::array();
    for (const auto& d : decisions) {
        util::ordered_json dj;
        dj["cwe_id"] = d.cwe_id;
        dj["title"] = d.title;
        dj["final_decision"] = d.confirmed ? "confirmed" : "rejected";
        dj["justification"] = d.justification;
        dj["defaulted"] = d.defaulted;
        decs.push_back(std::move(dj));
    }
    doc["decisions"] = std::move(decs);

    util::ordered_json confirmed_ids = util::ordered_json::array();
    for (const auto& c : candidates) {
        for (const auto& d : decisions) {
            if (d.cwe_id == c.cwe_id && d.confirmed) {
                confirmed_ids.push_back(c.cwe_id);
                break;
            }
        }
    }
    doc["confirmed"] = std::move(confirmed_ids);
    doc["confirmed_count"] = confirmed_count();
    doc["rejected_count"] = rejected_count();
    doc["defaulted_count"] = defaulted_count();
    doc["warnings"] = warnings;

    return util::dump_deterministic(doc);
}

ScanReport ScanReport::deserialize(std::string_view bytes) {
    auto doc = util::ordered_json::parse(bytes, nullptr, false);
    if (doc.is_discarded() || doc.value("schema", "") != "cwescout.report/1") {
        throw Error(Errc::Io, "not a cwescout report");
    }
    ScanReport report;
    report.function_sha256 = doc.value("function_sha256", "");
    report.context_free = doc.value("context_free", false);
    report.degraded = doc.value("degraded", false);
    report.single_agent = doc.value("single_agent", false);
    report.template_hash = doc.value("template_hash", "");
    if (doc.contains("provider_fingerprints")) {
        report.llm_fingerprint = doc["provider_fingerprints"].value("llm", "");
        report.embedder_fingerprint = doc["provider_fingerprints"].value("embedder", "");
    }
    report.function_text = doc.value("function_text", "");
    for (const auto& c : doc.value("candidates", util::ordered_json::array())) {
        report.candidates.push_back(candidate_from_json(c));
    }
    if (doc.contains("debate")) {
        const auto& dj = doc["debate"];
        report.debate.stop_reason = dj.value("stop_reason", "") == "APPROVED"
                                        ? StopReason::Approved
                                        : StopReason::MaxIterations;
        for (const auto& it_json : dj.value("iterations", util::ordered_json::array())) {
            DebateIteration iter;
            for (const auto& c : it_json.value("candidates", util::ordered_json::array())) {
                iter.candidates.push_back(candidate_from_json(c));
            }
            if (it_json.contains("verdict")) {
                iter.verdict.approve = it_json["verdict"].value("verdict", "") == "APPROVE";
                for (const auto& mj :
                     it_json["verdict"].value("missing", util::ordered_json::array())) {
                    iter.verdict.missing.push_back({mj.value("cwe_id", ""), mj.value("title", ""),
                                                    mj.value("hint", "")});
                }
            }
            report.debate.iterations.push_back(std::move(iter));
        }
    }
    for (const auto& rj : doc.value("requirements", util::ordered_json::array())) {
        ContextRequirement r;
        r.cwe_id = rj.value("cwe_id", "");
        r.context = rj.value("context", "");
        r.available = rj.value("available", false);
        std::string crit = rj.value("criticality", "Low");
        r.criticality = crit == "Critical"  ? Criticality::Critical
                        : crit == "High"    ? Criticality::High
                        : crit == "Medium"  ? Criticality::Medium
                                            : Criticality::Low;
        r.reason = rj.value("reason", "");
        report.requirements.push_back(std::move(r));
    }
    for (const auto& qj : doc.value("questions", util::ordered_json::array())) {
        ContextQuestion q;
        q.question = qj.value("question", "");
        q.reason = qj.value("reason", "");
        q.source_cwe_ids = qj.value("source_cwe_ids", std::vector<std::string>{});
        report.questions.push_back(std::move(q));
    }
    for (const auto& aj : doc.value("answers", util::ordered_json::array())) {
        ContextAnswer a;
        a.question = aj.value("question", "");
        a.answer = aj.value("answer", "");
        a.supporting_chunk_ids = aj.value("supporting_chunk_ids", std::vector<int64_t>{});
        report.answers.push_back(std::move(a));
    }
    for (const auto& dj : doc.value("decisions", util::ordered_json::array())) {
        AuditDecision d;
        d.cwe_id = dj.value("cwe_id", "");
        d.title = dj.value("title", "");
        d.confirmed = dj.value("final_decision", "") == "confirmed";
        d.justification = dj.value("justification", "");
        d.defaulted = dj.value("defaulted", false);
        report.decisions.push_back(std::move(d));
    }
    report.warnings = doc.value("warnings", std::vector<std::string>{});
    return report;
}

std::string ScanReport::report_filename() const {
    return function_sha256.substr(0, 16) + ".report";
}

} // namespace cwescout
