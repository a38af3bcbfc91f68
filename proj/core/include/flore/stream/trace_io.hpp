#pragma once

#include <filesystem>
#include <iosfwd>

#include "flore/stream/types.hpp"

namespace flore {

// Trace file format: UTF-8 text, one record per LF-terminated line,
// `<key-hex>,<value-decimal>`. Hex digits are written lowercase and
// accepted in either case. Blank lines are not permitted.

/// Parses a trace. `key_length` in bytes; 0 infers it from the first record.
/// Throws ParseError (with line number) or FormatError (inconsistent key length).
StreamTrace read_trace(std::istream& in, std::size_t key_length = 0, std::string name = "");
StreamTrace load_trace(const std::filesystem::path& path, std::size_t key_length = 0);

void write_trace(std::ostream& out, const StreamTrace& trace);
void save_trace(const std::filesystem::path& path, const StreamTrace& trace);

}  // namespace flore
