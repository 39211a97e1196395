#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cwescout {

/// One ingested text file. `lines` are newline-stripped; joining them with
/// '\n' and appending a final '\n' when `trailing_newline` is set
/// reproduces the on-disk bytes for files in the accepted encoding.
struct SourceFile {
    std::string path; // project-relative, '/' separators
    std::vector<std::string> lines;
    bool trailing_newline = false;
    std::optional<std::string> language_hint; // extension-derived

    std::string reconstruct() const;
};

struct LineRange {
    int start_line = 0; // 1-based inclusive
    int end_line = 0;   // 1-based inclusive
};

struct ProjectCorpus {
    std::string root;
    std::vector<SourceFile> files; // sorted by path
    std::vector<std::string> include_globs;
    std::vector<std::string> exclude_globs;
    std::vector<std::string> warnings; // skipped binaries, decode fallbacks
    // line regions withheld from chunking, per path (see exclude_function)
    std::map<std::string, std::vector<LineRange>> excluded_regions;
};

/// A window of at most K consecutive lines of one file; the retrieval unit.
struct Chunk {
    int64_t chunk_id = 0; // global ordinal over the sorted corpus
    std::string file_path;
    int start_line = 0; // 1-based inclusive
    int end_line = 0;   // 1-based inclusive
    std::string text;   // lines joined with '\n'
};

struct IngestOptions {
    std::vector<std::string> include_globs; // empty -> default source globs
    std::vector<std::string> exclude_globs; // merged with default excludes
};

const std::vector<std::string>& default_include_globs();
const std::vector<std::string>& default_exclude_globs();

/// Walks `root`, keeps text files matching include minus exclude, sorted by
/// path. Binary files (NUL in the first 8 KiB) are skipped with a warning;
/// invalid UTF-8 is decoded lossily with a warning.
/// Throws RootNotFound, NoFilesMatched.
ProjectCorpus ingest(const std::string& root, const IngestOptions& options = {});

/// Fixed windows of k lines per file, last window possibly shorter. Files
/// with excluded regions are chunked per contiguous remaining segment.
/// chunk_ids are assigned globally in (file_path, start_line) order.
std::vector<Chunk> chunk_corpus(const ProjectCorpus& corpus, int k);

/// Marks every file region whose normalized text equals the normalized
/// function text as excluded from chunking input. Normalization strips
/// trailing whitespace per line and ignores leading/trailing blank lines of
/// the needle. No-op if the function is not found.
ProjectCorpus exclude_function(const ProjectCorpus& corpus, const std::string& function_text);

/// Deterministic manifest (path, line_count, sha256 per file) for diffing
/// between runs.
std::string corpus_manifest(const ProjectCorpus& corpus);

} // namespace cwescout
