#include "chunkbench/util.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chunkbench/errors.hpp"

namespace chunkbench {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string content_key(std::string_view model_id, std::string_view text) {
    std::string payload;
    payload.reserve(model_id.size() + 1 + text.size());
    payload.append(model_id);
    payload.push_back('\x1f');
    payload.append(text);
    std::uint64_t a = fnv1a64(payload, kFnvOffset);
    std::uint64_t b = fnv1a64(payload, 0x9e3779b97f4a7c15ULL);
    return hex64(a) + hex64(b);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error("read failure: " + p.string());
    return ss.str();
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open file: " + p.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void ensure_dir(const std::filesystem::path& p) {
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw Error("cannot create directory " + p.string() + ": " + ec.message());
}

void write_file_atomic(const std::filesystem::path& p, std::string_view data) {
    if (p.has_parent_path()) ensure_dir(p.parent_path());
    static std::atomic<unsigned> counter{0};
    std::filesystem::path tmp = p;
    tmp += ".tmp" + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open for write: " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out) throw Error("write failure: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, p, ec);
    if (ec) throw Error("cannot rename " + tmp.string() + " -> " + p.string() + ": " + ec.message());
}

void append_line(const std::filesystem::path& p, std::string_view line) {
    if (p.has_parent_path()) ensure_dir(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot open for append: " + p.string());
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.put('\n');
    if (!out) throw Error("append failure: " + p.string());
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

}  // namespace chunkbench
