#pragma once

#include <string>

#include <json.hpp>

namespace tidygrid {

// Whole-file text IO; throws IoError with the offending path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// json::parse wrapped into ParseError, with `what` naming the input.
nlohmann::json parse_json_text(const std::string& text, const std::string& what);

// 16-hex-digit FNV-1a content hash, as recorded in run manifests.
std::string file_hash_hex(const std::string& path);

}  // namespace tidygrid
