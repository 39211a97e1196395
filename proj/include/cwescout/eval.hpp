#pragma once

#include "cwescout/pipeline.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cwescout::eval {

enum class SetTag { None, ContextDependent, ContextIndependent };

struct LabeledFunction {
    std::string id;
    std::string function_text;
    std::vector<std::string> ground_truth_cwes; // normalized ids
    std::optional<std::string> project_root;    // relative to the dataset file
    SetTag set_tag = SetTag::None;
};

struct DatasetLoad {
    std::vector<LabeledFunction> samples;
    std::vector<std::string> line_errors; // malformed lines, with line numbers
};

/// One JSON record per line: { id, function, cwes: [ids], project_root?,
/// set_tag? }. Malformed lines are collected, not fatal.
/// Throws DatasetNotFound, EmptyDataset, DuplicateId.
DatasetLoad load_dataset(const std::string& path);

struct RecallTable {
    std::vector<int> ks;
    std::vector<double> recall; // parallel to ks, non-decreasing
    int n = 0;
};

/// recall@k = fraction of samples whose truth intersects the first k ranked
/// ids. Match rule is exact normalized-id equality.
/// Throws EmptySamples.
RecallTable topk_recall(
    const std::vector<std::pair<std::vector<std::string>, std::set<std::string>>>& samples,
    const std::vector<int>& ks = {1, 3, 5, 10, 20});

struct ConfusionRow {
    std::string program_id;
    int tp = 0;
    int fp = 0;
    int tn = 0;
    int fn = 0;
    int missed_at_step1 = 0; // portion of fn never listed by step 1
};

/// Confusion over distinct final candidates. For CONTEXT_DEPENDENT samples
/// the listed weakness is mitigated by the broader context, so the
/// effective truth set is empty and a correct run rejects everything.
ConfusionRow confusion_for_program(const ScanReport& report,
                                   const std::vector<std::string>& truth_ids, SetTag set_tag,
                                   const std::string& program_id);

struct CandidateStats {
    int min = 0;
    double median = 0.0; // mean of the two middle values, 2 decimals
    double mean = 0.0;   // 2 decimals
    int max = 0;
};

/// Order statistics over per-report candidate counts. Throws EmptyInput.
CandidateStats candidate_stats(const std::vector<int>& counts);

enum class EvalMode { Step1Only, Full };

struct EvalDeps {
    /// Provider for one sample (replay, recording, live...).
    std::function<std::unique_ptr<ChatProvider>(const LabeledFunction&)> provider_for;
    EmbeddingProvider* embedder = nullptr;
    PipelineConfig pipeline;
    int k_chunk = 10;
    IngestOptions ingest;
    std::string base_dir; // resolves relative project roots
};

struct EvalResult {
    std::optional<RecallTable> recall;    // Step1Only
    std::vector<ConfusionRow> confusion;  // Full
    std::optional<CandidateStats> stats;
    std::vector<ScanReport> reports;      // Full only
    std::vector<std::string> errors;      // per-sample failures
};

/// Drives scans over the dataset and aggregates the metrics. Per-sample
/// failures are collected; the evaluation completes with partial results.
EvalResult run_eval(const std::vector<LabeledFunction>& samples, EvalDeps& deps, EvalMode mode);

/// Fixed-width plain-text tables.
std::string render_recall_table(const RecallTable& table, const std::string& row_label);
std::string render_confusion_table(const std::vector<ConfusionRow>& rows);
std::string render_candidate_stats(const CandidateStats& stats);

/// Machine-readable records, one JSON object per line.
std::string confusion_records(const std::vector<ConfusionRow>& rows);
std::string recall_records(const RecallTable& table, const std::string& arm);

} // namespace cwescout::eval
