#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "red/workload.hpp"

namespace red {

/// Reads and fully validates a workload file. Throws ParseError for
/// malformed JSON or wrongly typed fields, ValidationError for semantic
/// problems (unknown version, cycles, dangling references) and IoError when
/// the file cannot be read.
Workload parse_workload(const std::filesystem::path& path);

/// Same as parse_workload on in-memory text. origin prefixes diagnostics.
Workload parse_workload_text(std::string_view text, std::string_view origin = "<input>");

/// Pretty-printed JSON. parse_workload_text(serialize_workload(w)) == w.
std::string serialize_workload(const Workload& w);

/// Writes the file atomically (temp file then rename). Throws IoError.
void write_workload(const std::filesystem::path& path, const Workload& w);

/// Writes text to path via a temp file in the same directory and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace red
