// cwescout CLI: project indexing, function scans, evaluation runs, and
// cassette replay.

#include "cwescout/corpus.hpp"
#include "cwescout/embedder.hpp"
#include "cwescout/error.hpp"
#include "cwescout/eval.hpp"
#include "cwescout/llm.hpp"
#include "cwescout/pipeline.hpp"
#include "cwescout/util.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

using namespace cwescout;
namespace fs = std::filesystem;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitConfirmed = 1;
constexpr int kExitError = 2;

struct CliConfig {
    std::string llm_url;
    std::string llm_key;
    std::string llm_model = "gpt-4o";
    double temperature = 0.0;
    int max_tokens = 0; // 0 -> provider default
    int seed = -1;      // <0 -> unset
    std::string embedder = "mock"; // mock | http
    std::string embed_url;
    std::string embed_model = "all-MiniLM-L6-v2";
    int embed_dim = 256;
    int k_chunk = 10;
    int k_retrieval = 5;
    int max_iterations = 5;
    std::vector<std::string> include_globs;
    std::vector<std::string> exclude_globs;
    std::string record_path;
    std::string replay_path;
    bool single_agent = false;
    bool no_context = false;
};

void apply_config_file(CliConfig& cfg, const std::string& path) {
    auto doc = nlohmann::json::parse(util::read_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(Errc::Config, "config file " + path + " is not a JSON object");
    }
    auto get_str = [&doc](const char* key, std::string& out) {
        if (doc.contains(key) && doc[key].is_string()) out = doc[key].get<std::string>();
    };
    auto get_int = [&doc](const char* key, int& out) {
        if (doc.contains(key) && doc[key].is_number_integer()) out = doc[key].get<int>();
    };
    get_str("llm_url", cfg.llm_url);
    get_str("llm_key", cfg.llm_key);
    get_str("llm_model", cfg.llm_model);
    if (doc.contains("temperature") && doc["temperature"].is_number()) {
        cfg.temperature = doc["temperature"].get<double>();
    }
    get_int("max_tokens", cfg.max_tokens);
    get_int("seed", cfg.seed);
    get_str("embedder", cfg.embedder);
    get_str("embed_url", cfg.embed_url);
    get_str("embed_model", cfg.embed_model);
    get_int("embed_dim", cfg.embed_dim);
    get_int("k_chunk", cfg.k_chunk);
    get_int("k_retrieval", cfg.k_retrieval);
    get_int("max_iterations", cfg.max_iterations);
    if (doc.contains("include_globs")) {
        cfg.include_globs = doc["include_globs"].get<std::vector<std::string>>();
    }
    if (doc.contains("exclude_globs")) {
        cfg.exclude_globs = doc["exclude_globs"].get<std::vector<std::string>>();
    }
    if (doc.contains("single_agent") && doc["single_agent"].is_boolean()) {
        cfg.single_agent = doc["single_agent"].get<bool>();
    }
}

// environment overrides config-file credentials; flags never carry secrets
void apply_env(CliConfig& cfg) {
    if (const char* v = std::getenv("CWESCOUT_LLM_URL")) cfg.llm_url = v;
    if (const char* v = std::getenv("CWESCOUT_LLM_KEY")) cfg.llm_key = v;
    if (const char* v = std::getenv("CWESCOUT_EMBED_URL")) cfg.embed_url = v;
}

GenerationParams make_params(const CliConfig& cfg) {
    GenerationParams params;
    params.model = cfg.llm_model;
    params.temperature = cfg.temperature;
    if (cfg.max_tokens > 0) params.max_tokens = cfg.max_tokens;
    if (cfg.seed >= 0) params.seed = cfg.seed;
    return params;
}

PipelineConfig make_pipeline_config(const CliConfig& cfg) {
    PipelineConfig pc;
    pc.max_debate_iterations = cfg.max_iterations;
    pc.k_retrieval = cfg.k_retrieval;
    pc.single_agent = cfg.single_agent;
    pc.params = make_params(cfg);
    return pc;
}

std::unique_ptr<EmbeddingProvider> make_embedder(const CliConfig& cfg) {
    if (cfg.embedder == "mock") return std::make_unique<TokenHashEmbedder>(cfg.embed_dim);
    if (cfg.embedder == "http") {
        return std::make_unique<HttpEmbedder>(cfg.embed_url, cfg.embed_model, cfg.embed_dim);
    }
    throw Error(Errc::Config, "embedder must be 'mock' or 'http', got '" + cfg.embedder + "'");
}

IngestOptions make_ingest_options(const CliConfig& cfg) {
    return {cfg.include_globs, cfg.exclude_globs};
}

struct ChatStack {
    std::unique_ptr<ChatProvider> base;
    std::unique_ptr<RecordingProvider> recorder;
    ChatProvider* active = nullptr;
};

ChatStack make_chat(const CliConfig& cfg) {
    ChatStack stack;
    if (!cfg.replay_path.empty()) {
        stack.base = std::make_unique<ReplayProvider>(ReplayProvider::from_file(cfg.replay_path));
    } else {
        stack.base = std::make_unique<HttpChatProvider>(cfg.llm_url, cfg.llm_key);
    }
    stack.active = stack.base.get();
    if (!cfg.record_path.empty()) {
        stack.recorder = std::make_unique<RecordingProvider>(*stack.base);
        stack.active = stack.recorder.get();
    }
    return stack;
}

void print_scan_summary(const ScanReport& report, const std::string& report_path) {
    std::printf("function %s  (%s%s%s)\n", report.function_sha256.substr(0, 16).c_str(),
                report.context_free ? "CONTEXT_FREE" : "with project context",
                report.degraded ? ", DEGRADED" : "",
                report.single_agent ? ", single-agent" : "");
    std::printf("candidates: %zu   debate: %zu iteration(s), %s\n", report.candidates.size(),
                report.debate.iterations.size(),
                std::string(stop_reason_name(report.debate.stop_reason)).c_str());

    // confirmed first, ordered by probability like the report ranking
    std::printf("confirmed (%d):\n", report.confirmed_count());
    for (const auto& cand : report.candidates) {
        for (const auto& d : report.decisions) {
            if (d.cwe_id != cand.cwe_id || !d.confirmed) continue;
            std::printf("  %-10s p=%s  %s\n", cand.cwe_id.c_str(),
                        util::format_fixed(cand.probability, 2).c_str(),
                        d.justification.substr(0, 100).c_str());
        }
    }
    std::printf("rejected (%d):\n", report.rejected_count());
    for (const auto& cand : report.candidates) {
        for (const auto& d : report.decisions) {
            if (d.cwe_id != cand.cwe_id || d.confirmed) continue;
            std::printf("  %-10s p=%s  %s\n", cand.cwe_id.c_str(),
                        util::format_fixed(cand.probability, 2).c_str(),
                        d.justification.substr(0, 100).c_str());
        }
    }
    if (!report.warnings.empty()) {
        std::printf("warnings: %zu (see report file)\n", report.warnings.size());
    }
    std::printf("timings: step1 %lldms, step2 %lldms, step3 %lldms\n",
                static_cast<long long>(report.timings.step1.count()),
                static_cast<long long>(report.timings.step2.count()),
                static_cast<long long>(report.timings.step3.count()));
    std::printf("report: %s\n", report_path.c_str());
}

int cmd_index(const CliConfig& cfg, const std::string& root, const std::string& out) {
    auto corpus = ingest(root, make_ingest_options(cfg));
    auto chunks = chunk_corpus(corpus, cfg.k_chunk);
    auto embedder = make_embedder(cfg);
    auto index = build_index(chunks, *embedder);
    std::string bytes = serialize_index(index);

    bool up_to_date = false;
    if (fs::exists(out)) {
        up_to_date = util::read_file(out) == bytes;
    }
    if (up_to_date) {
        std::printf("index up to date\n");
    } else {
        util::write_file(out, bytes);
    }
    util::write_file(out + ".manifest.json", corpus_manifest(corpus));
    for (const auto& warning : corpus.warnings) {
        std::fprintf(stderr, "warning: %s\n", warning.c_str());
    }
    std::printf("%zu file(s), %zu chunk(s), dim %d -> %s\n", corpus.files.size(), chunks.size(),
                index.dim, out.c_str());
    return kExitClean;
}

int cmd_scan(const CliConfig& cfg, const std::string& function_file,
             const std::string& root, const std::string& out_dir) {
    std::string function_text = util::read_file(function_file);

    ProjectCorpus corpus;
    std::vector<Chunk> chunks;
    VectorIndex index;
    std::unique_ptr<EmbeddingProvider> embedder;
    ScanInputs inputs;
    if (!root.empty() && !cfg.no_context) {
        corpus = ingest(root, make_ingest_options(cfg));
        chunks = chunk_corpus(corpus, cfg.k_chunk);
        embedder = make_embedder(cfg);
        index = build_index(chunks, *embedder);
        inputs.index = &index;
        inputs.chunks = &chunks;
        inputs.embedder = embedder.get();
    }

    ChatStack chat = make_chat(cfg);
    ScanReport report = scan(*chat.active, function_text, inputs, make_pipeline_config(cfg));

    if (chat.recorder) chat.recorder->save(cfg.record_path);

    fs::create_directories(out_dir);
    std::string report_path = (fs::path(out_dir) / report.report_filename()).string();
    util::write_file(report_path, report.serialize());
    print_scan_summary(report, report_path);
    return report.confirmed_count() > 0 ? kExitConfirmed : kExitClean;
}

int cmd_eval(const CliConfig& cfg, const std::string& dataset_path, const std::string& mode_name,
             const std::string& out_dir) {
    auto load = eval::load_dataset(dataset_path);
    for (const auto& err : load.line_errors) {
        std::fprintf(stderr, "dataset: %s\n", err.c_str());
    }
    if (load.samples.empty()) {
        std::fprintf(stderr, "no loadable samples in %s\n", dataset_path.c_str());
        return kExitError;
    }

    eval::EvalMode mode =
        mode_name == "full" ? eval::EvalMode::Full : eval::EvalMode::Step1Only;

    auto embedder = make_embedder(cfg);

    // per-sample chat provider: recording wraps the live endpoint and
    // flushes its cassette when the sample finishes
    struct OwningRecorder : ChatProvider {
        std::unique_ptr<ChatProvider> inner;
        std::unique_ptr<RecordingProvider> recorder;
        std::string save_path;
        ~OwningRecorder() override {
            if (recorder) recorder->save(save_path);
        }
        std::string complete(const std::vector<ChatMessage>& m,
                             const GenerationParams& p) override {
            return recorder->complete(m, p);
        }
        std::string fingerprint() const override { return recorder->fingerprint(); }
    };

    if (!cfg.record_path.empty()) fs::create_directories(cfg.record_path);

    eval::EvalDeps deps;
    deps.embedder = embedder.get();
    deps.pipeline = make_pipeline_config(cfg);
    deps.k_chunk = cfg.k_chunk;
    deps.ingest = make_ingest_options(cfg);
    deps.base_dir = fs::path(dataset_path).parent_path().string();
    deps.provider_for = [&](const eval::LabeledFunction& sample) -> std::unique_ptr<ChatProvider> {
        if (!cfg.replay_path.empty()) {
            std::string cassette = (fs::path(cfg.replay_path) / (sample.id + ".cassette")).string();
            return std::make_unique<ReplayProvider>(ReplayProvider::from_file(cassette));
        }
        if (!cfg.record_path.empty()) {
            auto shim = std::make_unique<OwningRecorder>();
            shim->inner = std::make_unique<HttpChatProvider>(cfg.llm_url, cfg.llm_key);
            shim->recorder = std::make_unique<RecordingProvider>(*shim->inner);
            shim->save_path = (fs::path(cfg.record_path) / (sample.id + ".cassette")).string();
            return shim;
        }
        return std::make_unique<HttpChatProvider>(cfg.llm_url, cfg.llm_key);
    };

    auto result = eval::run_eval(load.samples, deps, mode);

    fs::create_directories(out_dir);
    std::string arm = cfg.single_agent ? "Single-agent" : "Multi-agent";
    if (result.recall) {
        std::string table = eval::render_recall_table(*result.recall, arm);
        std::printf("%s", table.c_str());
        util::write_file((fs::path(out_dir) / "recall.txt").string(), table);
        util::write_file((fs::path(out_dir) / "recall.jsonl").string(),
                         eval::recall_records(*result.recall, arm));
    }
    if (!result.confusion.empty()) {
        std::string table = eval::render_confusion_table(result.confusion);
        std::printf("%s", table.c_str());
        util::write_file((fs::path(out_dir) / "confusion.txt").string(), table);
        util::write_file((fs::path(out_dir) / "confusion.jsonl").string(),
                         eval::confusion_records(result.confusion));
        for (const auto& report : result.reports) {
            util::write_file((fs::path(out_dir) / report.report_filename()).string(),
                             report.serialize());
        }
    }
    if (result.stats) {
        std::string stats = eval::render_candidate_stats(*result.stats);
        std::printf("%s", stats.c_str());
        util::write_file((fs::path(out_dir) / "candidate_stats.txt").string(), stats);
    }
    if (!result.errors.empty()) {
        std::printf("completed with %zu sample error(s):\n", result.errors.size());
        for (const auto& err : result.errors) std::printf("  %s\n", err.c_str());
    }
    return kExitClean;
}

} // namespace

int main(int argc, char** argv) {
    CliConfig cfg;

    // --config loads first so flags can override file values
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                apply_config_file(cfg, argv[i + 1]);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return kExitError;
            }
        }
    }
    apply_env(cfg);

    CLI::App app{"cwescout — three-step multi-agent CWE scanner"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags remain valid after the subcommand name
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (loaded before flags)");
    app.add_option("--llm-url", cfg.llm_url, "chat completions endpoint")
        ->capture_default_str();
    app.add_option("--llm-model", cfg.llm_model, "chat model name")->capture_default_str();
    app.add_option("--temperature", cfg.temperature, "sampling temperature")
        ->capture_default_str();
    app.add_option("--max-tokens", cfg.max_tokens, "completion token cap (0 = provider default)")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "decoding seed (-1 = unset)")->capture_default_str();
    app.add_option("--embedder", cfg.embedder, "embedding provider: mock | http")
        ->capture_default_str();
    app.add_option("--embed-url", cfg.embed_url, "embeddings endpoint (http embedder)")
        ->capture_default_str();
    app.add_option("--embed-model", cfg.embed_model, "embedding model name")
        ->capture_default_str();
    app.add_option("--embed-dim", cfg.embed_dim, "embedding dimension")->capture_default_str();
    app.add_option("--k-chunk", cfg.k_chunk, "lines per chunk")->capture_default_str();
    app.add_option("--k-retrieval", cfg.k_retrieval, "chunks retrieved per question")
        ->capture_default_str();
    app.add_option("--max-iterations", cfg.max_iterations, "debate iteration cap")
        ->capture_default_str();
    app.add_option("--include", cfg.include_globs, "include glob (repeatable)");
    app.add_option("--exclude", cfg.exclude_globs, "exclude glob (repeatable)");
    app.add_option("--record", cfg.record_path,
                   "record cassette file (scan/replay) or directory (eval)");
    app.add_option("--replay", cfg.replay_path,
                   "replay cassette file (scan/replay) or directory (eval)");
    app.add_flag("--single-agent", cfg.single_agent, "disable the reviewer arm")
        ->capture_default_str();
    app.add_flag("--no-context", cfg.no_context, "skip step 2 even when a root is given")
        ->capture_default_str();

    auto* index_cmd = app.add_subcommand("index", "build the embedding index for a project");
    std::string index_root;
    std::string index_out = "cwescout.idx";
    index_cmd->add_option("root", index_root, "project directory")->required();
    index_cmd->add_option("--out", index_out, "index output path")->capture_default_str();

    auto* scan_cmd = app.add_subcommand("scan", "scan one function for CWEs");
    std::string scan_function;
    std::string scan_root;
    std::string scan_out_dir = ".";
    scan_cmd->add_option("function", scan_function, "file holding the function text")->required();
    scan_cmd->add_option("--root", scan_root, "project directory for context retrieval");
    scan_cmd->add_option("--out-dir", scan_out_dir, "report output directory")
        ->capture_default_str();

    auto* eval_cmd = app.add_subcommand("eval", "run the evaluation harness over a dataset");
    std::string eval_dataset;
    std::string eval_mode = "step1";
    std::string eval_out_dir = "eval-out";
    eval_cmd->add_option("dataset", eval_dataset, "JSONL dataset path")->required();
    eval_cmd->add_option("--mode", eval_mode, "step1 | full")->capture_default_str();
    eval_cmd->add_option("--out-dir", eval_out_dir, "tables/records output directory")
        ->capture_default_str();

    auto* replay_cmd = app.add_subcommand("replay", "re-render a report from a cassette");
    std::string replay_function;
    std::string replay_cassette;
    std::string replay_root;
    std::string replay_out_dir = ".";
    replay_cmd->add_option("function", replay_function, "file holding the function text")
        ->required();
    replay_cmd->add_option("cassette", replay_cassette, "cassette file to replay")->required();
    replay_cmd->add_option("--root", replay_root, "project directory for context retrieval");
    replay_cmd->add_option("--out-dir", replay_out_dir, "report output directory")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (index_cmd->parsed()) return cmd_index(cfg, index_root, index_out);
        if (scan_cmd->parsed()) return cmd_scan(cfg, scan_function, scan_root, scan_out_dir);
        if (eval_cmd->parsed()) {
            if (eval_mode != "step1" && eval_mode != "full") {
                std::fprintf(stderr, "error: --mode must be step1 or full\n");
                return kExitError;
            }
            return cmd_eval(cfg, eval_dataset, eval_mode, eval_out_dir);
        }
        if (replay_cmd->parsed()) {
            cfg.replay_path = replay_cassette;
            cfg.record_path.clear();
            return cmd_scan(cfg, replay_function, replay_root, replay_out_dir);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
