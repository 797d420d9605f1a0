#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "raglab/errors.hpp"

namespace raglab {

using json = nlohmann::json;

/// Parse one JSON object per non-empty line. Throws ParseError with the
/// offending line number on malformed input.
std::vector<json> read_jsonl(const std::filesystem::path& path);

/// Streaming variant: invokes `fn(record, line_number)` per record.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const json&, std::size_t)>& fn);

/// Serialize records one per line, via atomic_write.
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

/// Write to `<path>.tmp` then rename, so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Read a whole file into a string. Throws IoError if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// FNV-1a 64-bit hash, with the seed folded into the initial offset basis.
std::uint64_t fnv1a64(const std::string& data, std::uint64_t seed = 0);

} // namespace raglab
