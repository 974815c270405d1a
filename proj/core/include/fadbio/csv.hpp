#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Minimal CSV plumbing shared by readers, writers and report emitters.
// Files are UTF-8, comma-separated, LF line endings, '.' decimal separator,
// no quoting (none of the schemas need embedded commas). Numeric fields are
// written with shortest-round-trip formatting so that a parse/serialize cycle
// is a fixpoint.

namespace fadbio {

// Splits one line on commas. Returns views into `line`.
std::vector<std::string_view> split_csv_line(std::string_view line);

// Locale-independent double parse; rejects trailing garbage. Empty -> nullopt.
std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

// Shortest representation that round-trips exactly (std::to_chars).
std::string format_double(double v);

// Whole-file CSV loaded into memory; header row separated out.
struct CsvTable {
    std::string content;                              // backing storage
    std::vector<std::string_view> header;
    std::vector<std::vector<std::string_view>> rows;  // data rows
    std::vector<std::size_t> line_numbers;            // 1-based, parallel to rows
};

// Parses in-memory CSV content (the table keeps the backing string). Throws
// std::runtime_error when the content is empty or has no header row.
CsvTable parse_csv(std::string content);

// Throws std::runtime_error when the file cannot be read or is empty.
CsvTable read_csv(const std::string& path);

// Whole file as one string; throws std::runtime_error when unreadable.
std::string read_text_file(const std::string& path);

// Writes content to path atomically (temp file + rename).
void atomic_write_file(const std::string& path, const std::string& content);

// FNV-1a 64 digest of a byte string / file, as fixed-width hex.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);
std::string file_digest(const std::string& path);  // throws on unreadable file

}  // namespace fadbio
