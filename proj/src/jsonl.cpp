#include "raglab/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace raglab {

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::vector<json> out;
    read_jsonl(path, [&](const json& rec, std::size_t) { out.push_back(rec); });
    return out;
}

void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const json&, std::size_t)>& fn) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        bool blank = true;
        for (char c : line) {
            if (c != ' ' && c != '\t') {
                blank = false;
                break;
            }
        }
        if (blank) {
            continue;
        }
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded()) {
            throw ParseError("invalid JSON in " + path.string(), line_no);
        }
        if (!rec.is_object()) {
            throw ParseError("expected a JSON object in " + path.string(), line_no);
        }
        fn(rec, line_no);
    }
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
    std::ostringstream out;
    for (const auto& rec : records) {
        out << rec.dump() << '\n';
    }
    atomic_write(path, out.str());
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::uint64_t fnv1a64(const std::string& data, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ULL ^ seed;
    for (unsigned char c : data) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace raglab
