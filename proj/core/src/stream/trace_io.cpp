#include "flore/stream/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "flore/error.hpp"

namespace flore {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

StreamTrace read_trace(std::istream& in, std::size_t key_length, std::string name) {
  StreamTrace trace;
  trace.name = std::move(name);
  trace.key_length = key_length;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(line_no, "expected '<key-hex>,<value>'");
    const std::string_view hex(line.data(), comma);
    const std::string_view dec(line.data() + comma + 1, line.size() - comma - 1);
    if (hex.empty() || hex.size() % 2 != 0) throw ParseError(line_no, "key must be an even number of hex digits");

    Key key(hex.size() / 2, '\0');
    for (std::size_t i = 0; i < key.size(); ++i) {
      const int hi = hex_value(hex[2 * i]);
      const int lo = hex_value(hex[2 * i + 1]);
      if (hi < 0 || lo < 0) throw ParseError(line_no, "invalid hex digit in key");
      key[i] = static_cast<char>((hi << 4) | lo);
    }

    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(dec.data(), dec.data() + dec.size(), value);
    if (ec != std::errc() || ptr != dec.data() + dec.size()) throw ParseError(line_no, "invalid decimal value");
    if (value == 0) throw ParseError(line_no, "value must be non-zero");

    if (trace.key_length == 0) trace.key_length = key.size();
    if (key.size() != trace.key_length)
      throw FormatError("line " + std::to_string(line_no) + ": key length " + std::to_string(key.size()) +
                        " differs from trace key length " + std::to_string(trace.key_length));
    trace.items.push_back({std::move(key), value});
  }
  return trace;
}

StreamTrace load_trace(const std::filesystem::path& path, std::size_t key_length) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open trace file " + path.string());
  return read_trace(in, key_length, path.stem().string());
}

void write_trace(std::ostream& out, const StreamTrace& trace) {
  for (const auto& item : trace.items) out << to_hex(item.key) << ',' << item.value << '\n';
}

void save_trace(const std::filesystem::path& path, const StreamTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write trace file " + path.string());
  write_trace(out, trace);
}

}  // namespace flore
