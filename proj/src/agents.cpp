#include "cwescout/agents.hpp"

#include "cwescout/error.hpp"
#include "prompt_templates.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>

namespace cwescout {

std::string_view criticality_name(Criticality level) {
    switch (level) {
        case Criticality::Low: return "Low";
        case Criticality::Medium: return "Medium";
        case Criticality::High: return "High";
        case Criticality::Critical: return "Critical";
    }
    return "Low";
}

// ---------------------------------------------------------------------------
// CWE id normalization
// ---------------------------------------------------------------------------

std::vector<std::string> normalize_cwe_id(const std::string& raw) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= raw.size()) {
        size_t slash = raw.find('/', start);
        std::string part = raw.substr(start, slash == std::string::npos ? std::string::npos
                                                                        : slash - start);
        // strip optional case-insensitive "CWE" prefix with '-', '_' or space
        std::string t = util::trim(part);
        size_t i = 0;
        if (t.size() >= 3 && (t[0] == 'c' || t[0] == 'C') && (t[1] == 'w' || t[1] == 'W') &&
            (t[2] == 'e' || t[2] == 'E')) {
            i = 3;
            while (i < t.size() && (t[i] == '-' || t[i] == '_' || t[i] == ' ')) ++i;
        }
        size_t digits_start = i;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
        if (i > digits_start && i == t.size()) {
            std::string digits = t.substr(digits_start, i - digits_start);
            size_t nz = digits.find_first_not_of('0');
            digits = nz == std::string::npos ? "0" : digits.substr(nz);
            out.push_back("CWE-" + digits);
        }
        if (slash == std::string::npos) break;
        start = slash + 1;
    }
    // compound parts must all parse or the id is rejected as a whole
    size_t expected_parts = static_cast<size_t>(std::count(raw.begin(), raw.end(), '/')) + 1;
    if (out.size() != expected_parts) return {};
    return out;
}

long cwe_number(const std::string& normalized_id) {
    size_t dash = normalized_id.find('-');
    if (dash == std::string::npos) return -1;
    return std::strtol(normalized_id.c_str() + dash + 1, nullptr, 10);
}

void rank_candidates(std::vector<CandidateCwe>& candidates) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const CandidateCwe& a, const CandidateCwe& b) {
                         if (a.probability != b.probability) return a.probability > b.probability;
                         return cwe_number(a.cwe_id) < cwe_number(b.cwe_id);
                     });
}

namespace agents {

const std::string kRepairInstruction =
    "Your previous output was not valid per the required format; re-emit strictly in the "
    "required format.";

// ---------------------------------------------------------------------------
// Prompt rendering
// ---------------------------------------------------------------------------

std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(tpl.size());
    for (size_t i = 0; i < tpl.size(); ++i) {
        char c = tpl[i];
        if (c == '{') {
            if (i + 1 < tpl.size() && tpl[i + 1] == '{') {
                out.push_back('{');
                ++i;
                continue;
            }
            size_t close = tpl.find('}', i + 1);
            if (close == std::string_view::npos) {
                throw Error(Errc::Config, "unterminated placeholder in template");
            }
            std::string name(tpl.substr(i + 1, close - i - 1));
            auto it = vars.find(name);
            if (it == vars.end()) {
                throw Error(Errc::Config, "unknown placeholder {" + name + "}");
            }
            out += it->second;
            i = close;
            continue;
        }
        if (c == '}' && i + 1 < tpl.size() && tpl[i + 1] == '}') {
            out.push_back('}');
            ++i;
            continue;
        }
        out.push_back(c);
    }
    return out;
}

namespace {

util::ordered_json candidate_json(const CandidateCwe& c) {
    util::ordered_json j;
    j["CWE"] = c.cwe_id;
    j["title"] = c.title;
    j["probability"] = c.probability;
    j["justification"] = c.justification;
    return j;
}

util::ordered_json candidates_json(const std::vector<CandidateCwe>& candidates) {
    util::ordered_json arr = util::ordered_json::array();
    for (const auto& c : candidates) arr.push_back(candidate_json(c));
    return arr;
}

} // namespace

std::string lister_prompt(const std::string& function_text) {
    return render_template(prompts::kLister, {{"function", function_text}});
}

std::string reviewer_system_prompt() { return std::string(prompts::kReviewer); }

std::string reviewer_payload(const std::string& function_text,
                             const std::vector<CandidateCwe>& candidates) {
    util::ordered_json report;
    report["cwes"] = candidates_json(candidates);
    return "# Function under review:\n\n" + function_text + "\n\n# Previous CWE report:\n\n" +
           report.dump(2) + "\n";
}

std::string context_extractor_prompt(const std::string& function_text, const CandidateCwe& cand) {
    return render_template(prompts::kContextExtractor,
                           {{"function", function_text}, {"cwe", candidate_json(cand).dump()}});
}

std::string query_agent_prompt(const std::string& function_text,
                               const std::vector<ContextRequirement>& requirements) {
    // group by cwe_id, preserving first-seen order
    util::ordered_json groups = util::ordered_json::array();
    std::vector<std::string> seen;
    for (const auto& req : requirements) {
        if (std::find(seen.begin(), seen.end(), req.cwe_id) == seen.end()) {
            seen.push_back(req.cwe_id);
            util::ordered_json g;
            g["CWE"] = req.cwe_id;
            g["context_information"] = util::ordered_json::array();
            groups.push_back(std::move(g));
        }
        for (auto& g : groups) {
            if (g["CWE"] == req.cwe_id) {
                util::ordered_json item;
                item["context"] = req.context;
                item["available"] = req.available;
                item["criticality"] = std::string(criticality_name(req.criticality));
                item["reason"] = req.reason;
                g["context_information"].push_back(std::move(item));
                break;
            }
        }
    }
    return render_template(prompts::kQueryAgent,
                           {{"function", function_text}, {"context_details", groups.dump(2)}});
}

std::string context_synthesizer_prompt(const std::string& function_text, const ContextQuestion& q,
                                       const std::vector<ScoredChunk>& hits) {
    std::string contexts = "Question: " + q.question + "\n";
    for (size_t i = 0; i < hits.size(); ++i) {
        const Chunk& chunk = hits[i].chunk;
        contexts += "\nSnippet " + std::to_string(i + 1) + " [" + chunk.file_path + ":" +
                    std::to_string(chunk.start_line) + "-" + std::to_string(chunk.end_line) +
                    "]:\n" + chunk.text + "\n";
    }
    return render_template(prompts::kContextSynthesizer,
                           {{"function", function_text}, {"contexts", contexts}});
}

std::string contexts_payload(const std::vector<ContextAnswer>& answers) {
    if (answers.empty()) return "NO CONTEXT AVAILABLE";
    std::string out;
    for (size_t i = 0; i < answers.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += "Q: " + answers[i].question + "\nA: " + answers[i].answer;
    }
    return out;
}

std::string security_auditor_prompt(const std::string& function_text,
                                    const std::vector<CandidateCwe>& candidates,
                                    const std::vector<ContextAnswer>& answers) {
    return render_template(prompts::kSecurityAuditor,
                           {{"function", function_text},
                            {"potential_cwes", candidates_json(candidates).dump(2)},
                            {"contexts", contexts_payload(answers)}});
}

std::string template_hash() {
    std::string all;
    for (std::string_view tpl : {prompts::kLister, prompts::kReviewer, prompts::kContextExtractor,
                                 prompts::kQueryAgent, prompts::kContextSynthesizer,
                                 prompts::kSecurityAuditor}) {
        all += tpl;
        all.push_back('\0');
    }
    return util::sha256_hex(all);
}

// ---------------------------------------------------------------------------
// Parsers
// ---------------------------------------------------------------------------

namespace {

void warn(std::vector<std::string>* warnings, std::string message) {
    if (warnings) warnings->push_back(std::move(message));
}

std::optional<double> parse_probability(const nlohmann::json& value) {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) {
        const std::string& s = value.get_ref<const std::string&>();
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end != s.c_str() && end && util::trim(end).empty()) return v;
        return std::nullopt;
    }
    return std::nullopt;
}

std::string string_field(const nlohmann::json& obj, const char* key) {
    if (obj.contains(key) && obj[key].is_string()) return obj[key].get<std::string>();
    return {};
}

} // namespace

std::vector<CandidateCwe> parse_lister(const std::string& text,
                                       std::vector<std::string>* warnings) {
    nlohmann::json doc;
    try {
        doc = extract_structured_block(text);
    } catch (const Error& e) {
        throw Error(Errc::AgentOutputUnusable, std::string("lister: ") + e.what());
    }
    if (!doc.contains("cwes") || !doc["cwes"].is_array()) {
        throw Error(Errc::AgentOutputUnusable, "lister: no \"cwes\" array in output");
    }

    std::vector<CandidateCwe> merged;
    auto upsert = [&merged](const CandidateCwe& cand) {
        for (auto& existing : merged) {
            if (existing.cwe_id == cand.cwe_id) {
                if (cand.probability > existing.probability) existing = cand;
                return;
            }
        }
        merged.push_back(cand);
    };

    for (const auto& entry : doc["cwes"]) {
        if (!entry.is_object()) {
            warn(warnings, "lister: non-object candidate entry dropped");
            continue;
        }
        std::string raw_id = string_field(entry, "CWE");
        if (raw_id.empty()) raw_id = string_field(entry, "cwe");
        auto ids = normalize_cwe_id(raw_id);
        if (ids.empty()) {
            warn(warnings, "lister: unparseable CWE id '" + raw_id + "' dropped");
            continue;
        }
        auto prob = entry.contains("probability") ? parse_probability(entry["probability"])
                                                  : std::nullopt;
        if (!prob) {
            warn(warnings, "lister: candidate " + ids.front() + " without probability dropped");
            continue;
        }
        double p = *prob;
        if (p < 0.0 || p > 1.0) {
            warn(warnings, "lister: probability " + std::to_string(p) + " for " + ids.front() +
                               " clamped to [0,1]");
            p = std::clamp(p, 0.0, 1.0);
        }
        // compound ids split into multiple candidates sharing the fields
        for (const auto& id : ids) {
            CandidateCwe cand;
            cand.cwe_id = id;
            cand.title = string_field(entry, "title");
            cand.probability = p;
            cand.justification = string_field(entry, "justification");
            upsert(cand);
        }
    }
    return merged;
}

ReviewVerdict parse_reviewer(const std::string& text) {
    ReviewVerdict verdict;
    verdict.raw_text = text;

    auto [lines, trailing] = util::split_lines(text);
    (void)trailing;

    bool found_verdict = false;
    for (const auto& line : lines) {
        std::string upper = line;
        for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (upper.find("VERDICT") == std::string::npos) continue;
        size_t approve_pos = upper.find("APPROVE");
        size_t reject_pos = upper.find("REJECT");
        if (approve_pos == std::string::npos && reject_pos == std::string::npos) continue;
        verdict.approve = approve_pos < reject_pos;
        found_verdict = true;
        break;
    }
    if (!found_verdict) {
        throw Error(Errc::AgentOutputUnusable, "reviewer: no VERDICT line found");
    }
    if (verdict.approve) return verdict; // APPROVE implies no missing entries

    // numbered lines "N. CWE-ID: Title - hint"
    for (const auto& line : lines) {
        std::string t = util::trim(line);
        size_t i = 0;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
        if (i == 0 || i >= t.size() || t[i] != '.') continue;
        std::string body = util::trim(t.substr(i + 1));
        size_t colon = body.find(':');
        std::string id_part = colon == std::string::npos ? body : body.substr(0, colon);
        auto ids = normalize_cwe_id(id_part);
        if (ids.empty()) continue;
        std::string rest = colon == std::string::npos ? "" : util::trim(body.substr(colon + 1));
        size_t dash = rest.find(" - ");
        MissingCwe missing;
        missing.cwe_id = ids.front();
        missing.title = dash == std::string::npos ? rest : util::trim(rest.substr(0, dash));
        missing.hint = dash == std::string::npos ? "" : util::trim(rest.substr(dash + 3));
        verdict.missing.push_back(std::move(missing));
    }
    return verdict;
}

std::vector<ContextRequirement> parse_context_extractor(const std::string& text,
                                                        const std::string& cwe_id,
                                                        std::vector<std::string>* warnings) {
    nlohmann::json doc;
    try {
        doc = extract_structured_block(text);
    } catch (const Error& e) {
        throw Error(Errc::AgentOutputUnusable, std::string("context extractor: ") + e.what());
    }
    if (!doc.contains("context_information") || !doc["context_information"].is_array()) {
        throw Error(Errc::AgentOutputUnusable,
                    "context extractor: no \"context_information\" array");
    }

    std::vector<ContextRequirement> out;
    for (const auto& entry : doc["context_information"]) {
        if (!entry.is_object()) {
            warn(warnings, "context extractor: non-object entry dropped for " + cwe_id);
            continue;
        }
        ContextRequirement req;
        req.cwe_id = cwe_id;
        req.context = string_field(entry, "context");
        if (req.context.empty()) {
            warn(warnings, "context extractor: entry without context text dropped for " + cwe_id);
            continue;
        }

        std::string crit = util::to_lower(util::trim(string_field(entry, "criticality")));
        if (crit == "low") req.criticality = Criticality::Low;
        else if (crit == "medium") req.criticality = Criticality::Medium;
        else if (crit == "high") req.criticality = Criticality::High;
        else if (crit == "critical") req.criticality = Criticality::Critical;
        else {
            warn(warnings, "context extractor: criticality '" + crit + "' outside enum, entry for " +
                               cwe_id + " dropped");
            continue;
        }

        if (entry.contains("available")) {
            const auto& a = entry["available"];
            if (a.is_boolean()) {
                req.available = a.get<bool>();
            } else if (a.is_string()) {
                std::string s = util::to_lower(util::trim(a.get<std::string>()));
                if (s == "true") req.available = true;
                else if (s == "false") req.available = false;
                else {
                    warn(warnings, "context extractor: availability '" + s +
                                       "' unrecognized, assuming unavailable for " + cwe_id);
                    req.available = false;
                }
            } else if (a.is_number()) {
                req.available = a.get<double>() != 0.0;
            }
        }
        req.reason = string_field(entry, "reason");
        out.push_back(std::move(req));
    }
    return out;
}

std::vector<ContextQuestion> dedupe_questions(std::vector<ContextQuestion> questions) {
    std::vector<ContextQuestion> out;
    for (auto& q : questions) {
        std::string key = util::normalize_ws_casefold(q.question);
        bool merged = false;
        for (auto& existing : out) {
            if (util::normalize_ws_casefold(existing.question) == key) {
                for (const auto& id : q.source_cwe_ids) {
                    if (std::find(existing.source_cwe_ids.begin(), existing.source_cwe_ids.end(),
                                  id) == existing.source_cwe_ids.end()) {
                        existing.source_cwe_ids.push_back(id);
                    }
                }
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(std::move(q));
    }
    for (auto& q : out) {
        std::sort(q.source_cwe_ids.begin(), q.source_cwe_ids.end(),
                  [](const std::string& a, const std::string& b) {
                      return cwe_number(a) < cwe_number(b);
                  });
    }
    return out;
}

std::vector<ContextQuestion> parse_query_agent(const std::string& text,
                                               const std::vector<std::string>& all_cwe_ids) {
    nlohmann::json doc;
    try {
        doc = extract_structured_block(text);
    } catch (const Error& e) {
        throw Error(Errc::AgentOutputUnusable, std::string("query agent: ") + e.what());
    }
    if (!doc.contains("questions") || !doc["questions"].is_array()) {
        throw Error(Errc::AgentOutputUnusable, "query agent: no \"questions\" array");
    }

    std::vector<ContextQuestion> questions;
    for (const auto& entry : doc["questions"]) {
        if (!entry.is_object()) continue;
        ContextQuestion q;
        q.question = string_field(entry, "Question");
        if (q.question.empty()) q.question = string_field(entry, "question");
        if (util::trim(q.question).empty()) continue;
        q.reason = string_field(entry, "reason");

        // attribute by ids mentioned in the question or reason; otherwise all
        std::string haystack = q.question + " " + q.reason;
        for (const auto& id : all_cwe_ids) {
            if (haystack.find(id) != std::string::npos) q.source_cwe_ids.push_back(id);
        }
        if (q.source_cwe_ids.empty()) q.source_cwe_ids = all_cwe_ids;
        questions.push_back(std::move(q));
    }
    return dedupe_questions(std::move(questions));
}

std::vector<AuditDecision> parse_security_auditor(const std::string& text,
                                                  const std::vector<CandidateCwe>& candidates,
                                                  std::vector<std::string>* warnings) {
    nlohmann::json doc;
    try {
        doc = extract_structured_block(text);
    } catch (const Error& e) {
        throw Error(Errc::AgentOutputUnusable, std::string("auditor: ") + e.what());
    }
    if (!doc.contains("cwes") || !doc["cwes"].is_array()) {
        throw Error(Errc::AgentOutputUnusable, "auditor: no \"cwes\" array");
    }

    struct Parsed {
        bool confirmed;
        std::string title;
        std::string justification;
    };
    std::map<std::string, Parsed> by_id;
    for (const auto& entry : doc["cwes"]) {
        if (!entry.is_object()) continue;
        std::string raw_id = string_field(entry, "CWE");
        if (raw_id.empty()) raw_id = string_field(entry, "cwe");
        auto ids = normalize_cwe_id(raw_id);
        if (ids.empty()) {
            warn(warnings, "auditor: unparseable CWE id '" + raw_id + "' ignored");
            continue;
        }
        std::string decision = util::to_lower(util::trim(string_field(entry, "final_decision")));
        if (decision != "confirmed" && decision != "rejected") {
            warn(warnings, "auditor: decision '" + decision + "' for " + ids.front() +
                               " outside enum, ignored");
            continue;
        }
        for (const auto& id : ids) {
            if (by_id.count(id)) {
                warn(warnings, "auditor: duplicate decision for " + id + ", first kept");
                continue;
            }
            by_id[id] = {decision == "confirmed", string_field(entry, "title"),
                         string_field(entry, "justification")};
        }
    }

    std::vector<AuditDecision> decisions;
    std::set<std::string> candidate_ids;
    for (const auto& cand : candidates) {
        candidate_ids.insert(cand.cwe_id);
        AuditDecision d;
        d.cwe_id = cand.cwe_id;
        auto it = by_id.find(cand.cwe_id);
        if (it == by_id.end()) {
            // a dropped weakness must not vanish silently
            d.title = cand.title;
            d.confirmed = true;
            d.justification = "auditor omitted — fail-closed";
            d.defaulted = true;
            warn(warnings, "auditor: no decision for " + cand.cwe_id + ", defaulted to confirmed");
        } else {
            d.title = it->second.title.empty() ? cand.title : it->second.title;
            d.confirmed = it->second.confirmed;
            d.justification = it->second.justification;
        }
        decisions.push_back(std::move(d));
    }
    for (const auto& [id, parsed] : by_id) {
        if (!candidate_ids.count(id)) {
            warn(warnings, "auditor: decision for non-candidate " + id + " ignored");
        }
    }
    return decisions;
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

namespace {

bool is_replay_integrity_error(const Error& e) {
    return e.code() == Errc::CassetteMismatch || e.code() == Errc::CassetteExhausted;
}

std::string complete_once(AgentContext& ctx, const std::vector<ChatMessage>& messages) {
    if (ctx.call_count) ++*ctx.call_count;
    return ctx.chat.complete(messages, ctx.params);
}

/// One completion; on parse failure, a single repair turn and a re-parse.
/// Throws AgentOutputUnusable (or provider errors) when both fail.
template <typename Parse>
auto complete_with_repair(AgentContext& ctx, std::vector<ChatMessage> messages, Parse parse,
                          const char* agent_name) {
    std::string text = complete_once(ctx, messages);
    try {
        return parse(text);
    } catch (const Error& e) {
        if (is_replay_integrity_error(e)) throw;
        warn(ctx.warnings, std::string(agent_name) + ": output unusable (" + e.what() +
                               "), attempting one repair round");
    }
    messages.push_back({"assistant", text});
    messages.push_back({"user", kRepairInstruction});
    std::string repaired = complete_once(ctx, messages);
    return parse(repaired);
}

} // namespace

std::vector<CandidateCwe> run_lister(AgentContext& ctx, std::vector<ChatMessage>& conversation) {
    std::string text = complete_once(ctx, conversation);
    try {
        auto candidates = parse_lister(text, ctx.warnings);
        conversation.push_back({"assistant", text});
        return candidates;
    } catch (const Error& e) {
        if (is_replay_integrity_error(e)) throw;
        warn(ctx.warnings, std::string("lister: output unusable (") + e.what() +
                               "), attempting one repair round");
    }
    conversation.push_back({"assistant", text});
    conversation.push_back({"user", kRepairInstruction});
    std::string repaired = complete_once(ctx, conversation);
    auto candidates = parse_lister(repaired, ctx.warnings); // throws on second failure
    conversation.push_back({"assistant", repaired});
    return candidates;
}

ReviewVerdict run_reviewer(AgentContext& ctx, const std::string& function_text,
                           const std::vector<CandidateCwe>& candidates) {
    std::vector<ChatMessage> messages = {
        {"system", reviewer_system_prompt()},
        {"user", reviewer_payload(function_text, candidates)},
    };
    try {
        return complete_with_repair(
            ctx, std::move(messages), [](const std::string& t) { return parse_reviewer(t); },
            "reviewer");
    } catch (const Error& e) {
        if (is_replay_integrity_error(e)) throw;
        // fail-open: a lost reviewer only costs extra candidates
        warn(ctx.warnings, std::string("reviewer: unusable after repair (") + e.what() +
                               "), treating as APPROVE");
        ReviewVerdict verdict;
        verdict.approve = true;
        return verdict;
    }
}

std::vector<ContextRequirement> run_context_extractor(AgentContext& ctx,
                                                      const std::string& function_text,
                                                      const CandidateCwe& candidate) {
    std::vector<ChatMessage> messages = {
        {"user", context_extractor_prompt(function_text, candidate)}};
    try {
        return complete_with_repair(
            ctx, std::move(messages),
            [&](const std::string& t) {
                return parse_context_extractor(t, candidate.cwe_id, ctx.warnings);
            },
            "context extractor");
    } catch (const Error& e) {
        if (is_replay_integrity_error(e)) throw;
        warn(ctx.warnings, "context extractor: unusable for " + candidate.cwe_id + " (" +
                               e.what() + "), no requirements recorded");
        return {};
    }
}

std::vector<ContextQuestion> run_query_agent(AgentContext& ctx, const std::string& function_text,
                                             const std::vector<ContextRequirement>& requirements,
                                             const std::vector<std::string>& all_cwe_ids) {
    if (requirements.empty()) return {};
    std::vector<ChatMessage> messages = {{"user", query_agent_prompt(function_text, requirements)}};
    try {
        return complete_with_repair(
            ctx, std::move(messages),
            [&](const std::string& t) { return parse_query_agent(t, all_cwe_ids); }, "query agent");
    } catch (const Error& e) {
        if (is_replay_integrity_error(e)) throw;
        warn(ctx.warnings, std::string("query agent: unusable after repair (") + e.what() +
                               "), falling back to literal requirement questions");
        std::vector<ContextQuestion> fallback;
        for (const auto& req : requirements) {
            ContextQuestion q;
            q.question = req.context;
            q.reason = "literal requirement text (query agent fallback)";
            q.source_cwe_ids = {req.cwe_id};
            fallback.push_back(std::move(q));
        }
        return dedupe_questions(std::move(fallback));
    }
}

ContextAnswer run_context_synthesizer(AgentContext& ctx, const std::string& function_text,
                                      const ContextQuestion& question,
                                      const std::vector<ScoredChunk>& hits) {
    ContextAnswer answer;
    answer.question = question.question;
    for (const auto& hit : hits) answer.supporting_chunk_ids.push_back(hit.chunk.chunk_id);

    std::vector<ChatMessage> messages = {
        {"user", context_synthesizer_prompt(function_text, question, hits)}};
    try {
        answer.answer = complete_with_repair(
            ctx, std::move(messages),
            [](const std::string& t) -> std::string {
                if (util::trim(t).empty()) {
                    throw Error(Errc::AgentOutputUnusable, "synthesizer: empty answer");
                }
                return t;
            },
            "context synthesizer");
    } catch (const Error& e) {
        if (is_replay_integrity_error(e)) throw;
        warn(ctx.warnings, std::string("context synthesizer: unusable (") + e.what() +
                               "), answer marked unavailable");
        answer.answer = "NO CONTEXT AVAILABLE";
        answer.supporting_chunk_ids.clear();
    }
    return answer;
}

std::vector<AuditDecision> run_security_auditor(AgentContext& ctx,
                                                const std::string& function_text,
                                                const std::vector<CandidateCwe>& candidates,
                                                const std::vector<ContextAnswer>& answers,
                                                bool& degraded) {
    if (candidates.empty()) {
        throw Error(Errc::PreconditionViolation, "auditor requires a nonempty candidate list");
    }
    std::vector<ChatMessage> messages = {
        {"user", security_auditor_prompt(function_text, candidates, answers)}};
    try {
        return complete_with_repair(
            ctx, std::move(messages),
            [&](const std::string& t) {
                return parse_security_auditor(t, candidates, ctx.warnings);
            },
            "auditor");
    } catch (const Error& e) {
        if (is_replay_integrity_error(e)) throw;
        // fail-closed: losing the auditor must not hide a weakness
        warn(ctx.warnings, std::string("auditor: unusable after repair (") + e.what() +
                               "), all candidates confirmed; scan DEGRADED");
        degraded = true;
        std::vector<AuditDecision> decisions;
        for (const auto& cand : candidates) {
            AuditDecision d;
            d.cwe_id = cand.cwe_id;
            d.title = cand.title;
            d.confirmed = true;
            d.justification = "auditor output unusable — fail-closed";
            d.defaulted = true;
            decisions.push_back(std::move(d));
        }
        return decisions;
    }
}

} // namespace agents
} // namespace cwescout
