#include "cwescout/util.hpp"

#include "cwescout/error.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cwescout::util {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    // normalize negative zero so "-0.000000" never appears in artifacts
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
    return s;
}

namespace {

void dump_string(const std::string& s, std::string& out) {
    out.push_back('"');
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    out.push_back('"');
}

void dump_value(const ordered_json& v, int decimals, int indent, std::string& out) {
    const std::string pad(static_cast<size_t>(indent) * 2, ' ');
    const std::string pad_in(static_cast<size_t>(indent + 1) * 2, ' ');
    switch (v.type()) {
        case ordered_json::value_t::object: {
            if (v.empty()) { out += "{}"; return; }
            out += "{\n";
            size_t i = 0;
            for (auto it = v.begin(); it != v.end(); ++it, ++i) {
                out += pad_in;
                dump_string(it.key(), out);
                out += ": ";
                dump_value(it.value(), decimals, indent + 1, out);
                if (i + 1 < v.size()) out += ",";
                out += "\n";
            }
            out += pad + "}";
            return;
        }
        case ordered_json::value_t::array: {
            if (v.empty()) { out += "[]"; return; }
            out += "[\n";
            for (size_t i = 0; i < v.size(); ++i) {
                out += pad_in;
                dump_value(v[i], decimals, indent + 1, out);
                if (i + 1 < v.size()) out += ",";
                out += "\n";
            }
            out += pad + "]";
            return;
        }
        case ordered_json::value_t::string:
            dump_string(v.get_ref<const std::string&>(), out);
            return;
        case ordered_json::value_t::boolean:
            out += v.get<bool>() ? "true" : "false";
            return;
        case ordered_json::value_t::number_integer:
            out += std::to_string(v.get<int64_t>());
            return;
        case ordered_json::value_t::number_unsigned:
            out += std::to_string(v.get<uint64_t>());
            return;
        case ordered_json::value_t::number_float:
            out += format_fixed(v.get<double>(), decimals);
            return;
        default:
            out += "null";
            return;
    }
}

} // namespace

std::string dump_deterministic(const ordered_json& value, int float_decimals) {
    std::string out;
    dump_value(value, float_decimals, 0, out);
    out.push_back('\n');
    return out;
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view text) {
    size_t b = text.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(b, e - b + 1));
}

std::string normalize_ws_casefold(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_ws = true; // trims leading whitespace
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            in_ws = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    return out;
}

std::pair<std::vector<std::string>, bool> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) lines.emplace_back(text.substr(start));
            return {std::move(lines), !text.empty() && text.back() == '\n'};
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return {std::move(lines), true};
}

namespace {

// Recursive matcher over pattern/path tails. '**' may consume any number of
// path characters including separators; '*' and '?' stop at '/'.
bool glob_match_impl(std::string_view pat, std::string_view path) {
    while (!pat.empty()) {
        if (pat.size() >= 2 && pat[0] == '*' && pat[1] == '*') {
            std::string_view rest = pat.substr(2);
            // "**/" also matches zero directories
            if (!rest.empty() && rest[0] == '/') {
                if (glob_match_impl(rest.substr(1), path)) return true;
            }
            if (glob_match_impl(rest, path)) return true;
            if (path.empty()) return false;
            path.remove_prefix(1);
            continue;
        }
        if (pat[0] == '*') {
            std::string_view rest = pat.substr(1);
            while (true) {
                if (glob_match_impl(rest, path)) return true;
                if (path.empty() || path[0] == '/') return false;
                path.remove_prefix(1);
            }
        }
        if (path.empty()) return false;
        if (pat[0] == '?') {
            if (path[0] == '/') return false;
        } else if (pat[0] != path[0]) {
            return false;
        }
        pat.remove_prefix(1);
        path.remove_prefix(1);
    }
    return path.empty();
}

} // namespace

bool glob_match(std::string_view pattern, std::string_view path) {
    return glob_match_impl(pattern, path);
}

std::string utf8_lossy(std::string_view bytes) {
    static const std::string_view replacement = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(bytes.size());
    size_t i = 0;
    while (i < bytes.size()) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        size_t len;
        unsigned int min_cp, cp;
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2; min_cp = 0x80; cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3; min_cp = 0x800; cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4; min_cp = 0x10000; cp = c & 0x07;
        } else {
            out += replacement;
            ++i;
            continue;
        }
        if (i + len > bytes.size()) {
            out += replacement;
            ++i;
            continue;
        }
        bool ok = true;
        for (size_t j = 1; j < len; ++j) {
            unsigned char cc = static_cast<unsigned char>(bytes[i + j]);
            if ((cc & 0xC0) != 0x80) { ok = false; break; }
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!ok || cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out += replacement;
            ++i;
            continue;
        }
        out.append(bytes.substr(i, len));
        i += len;
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::Io, "short write to " + path);
}

} // namespace cwescout::util
