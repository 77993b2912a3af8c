#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sentibt {

// Minimal strict CSV support: comma separator, double-quote quoting with ""
// escapes, one record per line (no embedded newlines). Every loader in this
// project reports problems by 1-based line number, so rows keep theirs.
struct CsvRow {
    int line = 0;
    std::vector<std::string> fields;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<CsvRow> rows;

    // Column position by exact header name.
    std::optional<std::size_t> column(const std::string& name) const;
};

// Parses one CSV line; throws Error("MalformedCsv", ...) on unbalanced quotes.
std::vector<std::string> split_csv_line(const std::string& line, int line_no);

// Reads a whole file. Blank lines are skipped. Throws on I/O failure,
// unbalanced quotes, or rows whose field count differs from the header's.
CsvTable read_csv(const std::string& path);

// Quotes a value iff it contains a comma, quote, or leading/trailing space.
std::string csv_escape(const std::string& value);

// Shortest round-trip decimal text for a double (std::to_chars).
std::string format_double(double v);

} // namespace sentibt
