#include "cwescout/corpus.hpp"

#include "cwescout/error.hpp"
#include "cwescout/util.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace cwescout {

namespace {

constexpr size_t kBinarySniffBytes = 8 * 1024;

const std::map<std::string, std::string>& language_hints() {
    static const std::map<std::string, std::string> map = {
        {".c", "c"},     {".h", "c"},      {".cpp", "cpp"}, {".cc", "cpp"},
        {".cxx", "cpp"}, {".hpp", "cpp"},  {".hh", "cpp"},  {".hxx", "cpp"},
        {".py", "python"}, {".js", "javascript"}, {".ts", "typescript"},
        {".java", "java"}, {".go", "go"},  {".rs", "rust"}, {".rb", "ruby"},
        {".php", "php"}, {".cs", "csharp"}, {".m", "objective-c"},
        {".sh", "shell"}, {".pl", "perl"}, {".kt", "kotlin"}, {".swift", "swift"},
    };
    return map;
}

bool matches_any(const std::vector<std::string>& globs, const std::string& path) {
    for (const auto& g : globs) {
        if (util::glob_match(g, path)) return true;
        // allow bare-extension patterns like "*.c" to match nested paths
        if (g.rfind("**/", 0) != 0 && util::glob_match("**/" + g, path)) return true;
    }
    return false;
}

bool looks_binary(const std::string& bytes) {
    size_t n = std::min(bytes.size(), kBinarySniffBytes);
    return bytes.find('\0', 0) < n;
}

std::vector<std::string> rstripped(const std::vector<std::string>& lines) {
    std::vector<std::string> out;
    out.reserve(lines.size());
    for (const auto& l : lines) {
        size_t e = l.find_last_not_of(" \t\r");
        out.push_back(e == std::string::npos ? std::string() : l.substr(0, e + 1));
    }
    return out;
}

} // namespace

std::string SourceFile::reconstruct() const {
    std::string out;
    for (size_t i = 0; i < lines.size(); ++i) {
        out += lines[i];
        if (i + 1 < lines.size()) out.push_back('\n');
    }
    if (trailing_newline) out.push_back('\n');
    return out;
}

const std::vector<std::string>& default_include_globs() {
    static const std::vector<std::string> globs = {
        "**/*.c",   "**/*.h",   "**/*.cpp", "**/*.cc",  "**/*.cxx",
        "**/*.hpp", "**/*.hh",  "**/*.hxx", "**/*.py",  "**/*.js",
        "**/*.ts",  "**/*.java", "**/*.go", "**/*.rs",  "**/*.rb",
        "**/*.php", "**/*.cs",  "**/*.m",   "**/*.sh",  "**/*.pl",
        "**/*.kt",  "**/*.swift",
    };
    return globs;
}

const std::vector<std::string>& default_exclude_globs() {
    static const std::vector<std::string> globs = {
        "**/.git/**",
        "**/node_modules/**",
        "**/build/**",
    };
    return globs;
}

ProjectCorpus ingest(const std::string& root, const IngestOptions& options) {
    fs::path root_path(root);
    std::error_code ec;
    if (!fs::is_directory(root_path, ec)) {
        throw Error(Errc::RootNotFound, root + " is not a readable directory");
    }

    ProjectCorpus corpus;
    corpus.root = root;
    corpus.include_globs = options.include_globs.empty() ? default_include_globs() : options.include_globs;
    corpus.exclude_globs = default_exclude_globs();
    corpus.exclude_globs.insert(corpus.exclude_globs.end(), options.exclude_globs.begin(),
                                options.exclude_globs.end());

    std::vector<std::string> rel_paths;
    for (auto it = fs::recursive_directory_iterator(
             root_path, fs::directory_options::skip_permission_denied, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (!it->is_regular_file(ec)) continue;
        std::string rel = it->path().lexically_relative(root_path).generic_string();
        if (!matches_any(corpus.include_globs, rel)) continue;
        if (matches_any(corpus.exclude_globs, rel)) continue;
        rel_paths.push_back(std::move(rel));
    }
    std::sort(rel_paths.begin(), rel_paths.end());

    for (const auto& rel : rel_paths) {
        std::string bytes;
        try {
            bytes = util::read_file((root_path / rel).string());
        } catch (const Error&) {
            corpus.warnings.push_back("unreadable file skipped: " + rel);
            continue;
        }
        if (looks_binary(bytes)) {
            corpus.warnings.push_back("binary file skipped: " + rel);
            continue;
        }
        std::string decoded = util::utf8_lossy(bytes);
        if (decoded != bytes) {
            corpus.warnings.push_back("invalid UTF-8 replaced in: " + rel);
        }
        SourceFile file;
        file.path = rel;
        auto [lines, trailing] = util::split_lines(decoded);
        file.lines = std::move(lines);
        file.trailing_newline = trailing;
        std::string ext = fs::path(rel).extension().string();
        auto hint = language_hints().find(util::to_lower(ext));
        if (hint != language_hints().end()) file.language_hint = hint->second;
        corpus.files.push_back(std::move(file));
    }

    if (corpus.files.empty()) {
        throw Error(Errc::NoFilesMatched,
                    "no files under " + root + " match the include globs");
    }
    return corpus;
}

std::vector<Chunk> chunk_corpus(const ProjectCorpus& corpus, int k) {
    if (k < 1) throw Error(Errc::PreconditionViolation, "chunk size k must be >= 1");

    std::vector<Chunk> chunks;
    int64_t next_id = 0;
    for (const auto& file : corpus.files) {
        int line_count = static_cast<int>(file.lines.size());
        if (line_count == 0) continue;

        // contiguous segments remaining after exclusions
        std::vector<LineRange> segments;
        auto excluded = corpus.excluded_regions.find(file.path);
        if (excluded == corpus.excluded_regions.end() || excluded->second.empty()) {
            segments.push_back({1, line_count});
        } else {
            std::vector<LineRange> holes = excluded->second;
            std::sort(holes.begin(), holes.end(),
                      [](const LineRange& a, const LineRange& b) { return a.start_line < b.start_line; });
            int cursor = 1;
            for (const auto& hole : holes) {
                if (hole.start_line > cursor) segments.push_back({cursor, hole.start_line - 1});
                cursor = std::max(cursor, hole.end_line + 1);
            }
            if (cursor <= line_count) segments.push_back({cursor, line_count});
        }

        for (const auto& seg : segments) {
            for (int start = seg.start_line; start <= seg.end_line; start += k) {
                int end = std::min(start + k - 1, seg.end_line);
                Chunk chunk;
                chunk.chunk_id = next_id++;
                chunk.file_path = file.path;
                chunk.start_line = start;
                chunk.end_line = end;
                std::string text;
                for (int line = start; line <= end; ++line) {
                    text += file.lines[static_cast<size_t>(line - 1)];
                    if (line < end) text.push_back('\n');
                }
                chunk.text = std::move(text);
                chunks.push_back(std::move(chunk));
            }
        }
    }
    return chunks;
}

ProjectCorpus exclude_function(const ProjectCorpus& corpus, const std::string& function_text) {
    auto [needle_raw, needle_trailing] = util::split_lines(function_text);
    (void)needle_trailing;
    std::vector<std::string> needle = rstripped(needle_raw);
    while (!needle.empty() && needle.front().empty()) needle.erase(needle.begin());
    while (!needle.empty() && needle.back().empty()) needle.pop_back();

    ProjectCorpus out = corpus;
    if (needle.empty()) return out;

    for (const auto& file : corpus.files) {
        std::vector<std::string> hay = rstripped(file.lines);
        if (hay.size() < needle.size()) continue;
        for (size_t i = 0; i + needle.size() <= hay.size(); ++i) {
            if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<long>(i))) {
                out.excluded_regions[file.path].push_back(
                    {static_cast<int>(i + 1), static_cast<int>(i + needle.size())});
                i += needle.size() - 1;
            }
        }
    }
    return out;
}

std::string corpus_manifest(const ProjectCorpus& corpus) {
    util::ordered_json manifest;
    util::ordered_json files = util::ordered_json::array();
    for (const auto& file : corpus.files) {
        util::ordered_json rec;
        rec["path"] = file.path;
        rec["line_count"] = static_cast<int64_t>(file.lines.size());
        rec["sha256"] = util::sha256_hex(file.reconstruct());
        files.push_back(std::move(rec));
    }
    manifest["files"] = std::move(files);
    return util::dump_deterministic(manifest);
}

} // namespace cwescout
