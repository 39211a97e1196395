#include "cwescout/eval.hpp"

#include "cwescout/corpus.hpp"
#include "cwescout/error.hpp"
#include "cwescout/util.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <sstream>

namespace cwescout::eval {

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

} // namespace

DatasetLoad load_dataset(const std::string& path) {
    std::string bytes;
    try {
        bytes = util::read_file(path);
    } catch (const Error&) {
        throw Error(Errc::DatasetNotFound, path);
    }

    DatasetLoad load;
    std::map<std::string, int> id_lines;
    auto [lines, trailing] = util::split_lines(bytes);
    (void)trailing;
    for (size_t i = 0; i < lines.size(); ++i) {
        int line_no = static_cast<int>(i) + 1;
        if (util::trim(lines[i]).empty()) continue;
        auto rec = nlohmann::json::parse(lines[i], nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            load.line_errors.push_back("line " + std::to_string(line_no) + ": not a JSON object");
            continue;
        }
        if (!rec.contains("id") || !rec["id"].is_string() || !rec.contains("function") ||
            !rec["function"].is_string() || !rec.contains("cwes") || !rec["cwes"].is_array()) {
            load.line_errors.push_back("line " + std::to_string(line_no) +
                                       ": missing id/function/cwes field");
            continue;
        }
        LabeledFunction sample;
        sample.id = rec["id"].get<std::string>();
        sample.function_text = rec["function"].get<std::string>();
        bool ok = true;
        for (const auto& raw : rec["cwes"]) {
            if (!raw.is_string()) { ok = false; break; }
            auto ids = normalize_cwe_id(raw.get<std::string>());
            if (ids.empty()) { ok = false; break; }
            for (auto& id : ids) sample.ground_truth_cwes.push_back(std::move(id));
        }
        if (!ok) {
            load.line_errors.push_back("line " + std::to_string(line_no) +
                                       ": unparseable ground-truth CWE id");
            continue;
        }
        if (rec.contains("project_root") && rec["project_root"].is_string()) {
            sample.project_root = rec["project_root"].get<std::string>();
        }
        std::string tag = rec.value("set_tag", "");
        if (tag == "CONTEXT_DEPENDENT") sample.set_tag = SetTag::ContextDependent;
        else if (tag == "CONTEXT_INDEPENDENT") sample.set_tag = SetTag::ContextIndependent;
        else if (!tag.empty()) {
            load.line_errors.push_back("line " + std::to_string(line_no) + ": unknown set_tag '" +
                                       tag + "'");
            continue;
        }

        auto dup = id_lines.find(sample.id);
        if (dup != id_lines.end()) {
            throw Error(Errc::DuplicateId, "id '" + sample.id + "' on lines " +
                                               std::to_string(dup->second) + " and " +
                                               std::to_string(line_no));
        }
        id_lines[sample.id] = line_no;
        load.samples.push_back(std::move(sample));
    }
    if (load.samples.empty() && load.line_errors.empty()) {
        throw Error(Errc::EmptyDataset, path + " contains no records");
    }
    return load;
}

RecallTable topk_recall(
    const std::vector<std::pair<std::vector<std::string>, std::set<std::string>>>& samples,
    const std::vector<int>& ks) {
    if (samples.empty()) throw Error(Errc::EmptySamples, "no samples for recall");

    RecallTable table;
    table.ks = ks;
    table.n = static_cast<int>(samples.size());
    for (int k : ks) {
        int hits = 0;
        for (const auto& [ranking, truth] : samples) {
            size_t limit = std::min<size_t>(static_cast<size_t>(k), ranking.size());
            bool hit = false;
            for (size_t i = 0; i < limit && !hit; ++i) {
                hit = truth.count(ranking[i]) > 0;
            }
            if (hit) ++hits;
        }
        table.recall.push_back(static_cast<double>(hits) / static_cast<double>(samples.size()));
    }
    return table;
}

ConfusionRow confusion_for_program(const ScanReport& report,
                                   const std::vector<std::string>& truth_ids, SetTag set_tag,
                                   const std::string& program_id) {
    ConfusionRow row;
    row.program_id = program_id;

    // context-mitigated programs: the apparent weakness is not a real one
    std::set<std::string> truth;
    if (set_tag != SetTag::ContextDependent) {
        truth.insert(truth_ids.begin(), truth_ids.end());
    }

    std::set<std::string> seen;
    for (const auto& decision : report.decisions) {
        if (!seen.insert(decision.cwe_id).second) continue;
        bool is_truth = truth.count(decision.cwe_id) > 0;
        if (decision.confirmed) {
            is_truth ? ++row.tp : ++row.fp;
        } else {
            is_truth ? ++row.fn : ++row.tn;
        }
    }
    for (const auto& id : truth) {
        if (!seen.count(id)) {
            ++row.fn;
            ++row.missed_at_step1;
        }
    }
    return row;
}

CandidateStats candidate_stats(const std::vector<int>& counts) {
    if (counts.empty()) throw Error(Errc::EmptyInput, "no candidate counts");

    std::vector<int> sorted = counts;
    std::sort(sorted.begin(), sorted.end());
    CandidateStats stats;
    stats.min = sorted.front();
    stats.max = sorted.back();
    size_t n = sorted.size();
    double median = n % 2 == 1 ? sorted[n / 2]
                               : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    stats.median = round2(median);
    stats.mean = round2(std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                        static_cast<double>(n));
    return stats;
}

EvalResult run_eval(const std::vector<LabeledFunction>& samples, EvalDeps& deps, EvalMode mode) {
    if (samples.empty()) throw Error(Errc::EmptyDataset, "no samples to evaluate");

    EvalResult result;
    std::vector<std::pair<std::vector<std::string>, std::set<std::string>>> recall_samples;
    std::vector<int> counts;

    for (const auto& sample : samples) {
        try {
            auto provider = deps.provider_for(sample);
            if (!provider) throw Error(Errc::Config, "no provider for sample " + sample.id);

            ProjectCorpus corpus;
            std::vector<Chunk> chunks;
            VectorIndex index;
            ScanInputs inputs;
            if (mode == EvalMode::Full && sample.project_root && deps.embedder) {
                std::filesystem::path root(*sample.project_root);
                if (root.is_relative() && !deps.base_dir.empty()) {
                    root = std::filesystem::path(deps.base_dir) / root;
                }
                corpus = ingest(root.string(), deps.ingest);
                chunks = chunk_corpus(corpus, deps.k_chunk);
                index = build_index(chunks, *deps.embedder);
                inputs.index = &index;
                inputs.chunks = &chunks;
                inputs.embedder = deps.embedder;
            }

            if (mode == EvalMode::Step1Only) {
                agents::AgentContext ctx{*provider, deps.pipeline.params, nullptr, nullptr};
                auto [candidates, debate] = step1_list_candidates(
                    ctx, sample.function_text, deps.pipeline.max_debate_iterations,
                    deps.pipeline.single_agent);
                (void)debate;
                std::vector<std::string> ranking;
                for (const auto& c : candidates) ranking.push_back(c.cwe_id);
                recall_samples.push_back(
                    {std::move(ranking), std::set<std::string>(sample.ground_truth_cwes.begin(),
                                                               sample.ground_truth_cwes.end())});
                counts.push_back(static_cast<int>(candidates.size()));
            } else {
                ScanReport report = scan(*provider, sample.function_text, inputs, deps.pipeline);
                counts.push_back(static_cast<int>(report.candidates.size()));
                result.confusion.push_back(confusion_for_program(report, sample.ground_truth_cwes,
                                                                 sample.set_tag, sample.id));
                result.reports.push_back(std::move(report));
            }
        } catch (const std::exception& e) {
            result.errors.push_back(sample.id + ": " + e.what());
        }
    }

    if (mode == EvalMode::Step1Only && !recall_samples.empty()) {
        result.recall = topk_recall(recall_samples);
    }
    if (!counts.empty()) result.stats = candidate_stats(counts);
    return result;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

std::string render_recall_table(const RecallTable& table, const std::string& row_label) {
    std::ostringstream out;
    size_t label_width = std::max<size_t>(row_label.size(), 12);
    out << std::string(label_width, ' ');
    for (int k : table.ks) {
        std::string head = "Top-" + std::to_string(k);
        out << "  " << head << std::string(head.size() < 7 ? 7 - head.size() : 0, ' ');
    }
    out << "\n" << row_label << std::string(label_width - row_label.size(), ' ');
    for (double r : table.recall) {
        std::string cell = util::format_fixed(r * 100.0, 1) + "%";
        out << "  " << cell << std::string(cell.size() < 7 ? 7 - cell.size() : 0, ' ');
    }
    out << "  (n=" << table.n << ")\n";
    return out.str();
}

std::string render_confusion_table(const std::vector<ConfusionRow>& rows) {
    size_t id_width = 7;
    for (const auto& row : rows) id_width = std::max(id_width, row.program_id.size());

    std::ostringstream out;
    out << "Program" << std::string(id_width - 7, ' ') << "  TP  FP  TN  FN\n";
    int total_missed = 0;
    for (const auto& row : rows) {
        out << row.program_id << std::string(id_width - row.program_id.size(), ' ');
        auto cell = [&out](int v, bool star) {
            std::string s = std::to_string(v) + (star ? "*" : "");
            out << std::string(s.size() < 4 ? 4 - s.size() : 1, ' ') << s;
        };
        cell(row.tp, false);
        cell(row.fp, false);
        cell(row.tn, false);
        cell(row.fn, row.missed_at_step1 > 0);
        out << "\n";
        total_missed += row.missed_at_step1;
    }
    if (total_missed > 0) {
        out << "* includes " << total_missed << " weakness(es) never listed at step 1\n";
    }
    return out.str();
}

std::string render_candidate_stats(const CandidateStats& stats) {
    std::ostringstream out;
    out << "Candidates per function: min " << stats.min << ", median "
        << util::format_fixed(stats.median, 2) << ", mean " << util::format_fixed(stats.mean, 2)
        << ", max " << stats.max << "\n";
    return out.str();
}

std::string confusion_records(const std::vector<ConfusionRow>& rows) {
    std::string out;
    for (const auto& row : rows) {
        util::ordered_json rec;
        rec["program_id"] = row.program_id;
        rec["tp"] = row.tp;
        rec["fp"] = row.fp;
        rec["tn"] = row.tn;
        rec["fn"] = row.fn;
        rec["missed_at_step1"] = row.missed_at_step1;
        out += rec.dump();
        out += "\n";
    }
    return out;
}

std::string recall_records(const RecallTable& table, const std::string& arm) {
    std::string out;
    for (size_t i = 0; i < table.ks.size(); ++i) {
        util::ordered_json rec;
        rec["arm"] = arm;
        rec["k"] = table.ks[i];
        rec["recall"] = table.recall[i];
        rec["n"] = table.n;
        out += rec.dump();
        out += "\n";
    }
    return out;
}

} // namespace cwescout::eval
