#include "sentibt/csv.hpp"

#include <charconv>
#include <fstream>

#include "sentibt/error.hpp"

namespace sentibt {

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

std::vector<std::string> split_csv_line(const std::string& line, int line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (in_quotes) {
        throw Error("MalformedCsv", "ingest", "read_csv", "line " + std::to_string(line_no),
                    "unbalanced quote");
    }
    fields.push_back(std::move(cur));
    return fields;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw Error("FileNotFound", "ingest", "read_csv", path, "cannot open file");
    }
    CsvTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line, line_no);
        if (table.header.empty()) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size()) {
                throw Error("MalformedCsv", "ingest", "read_csv",
                            "line " + std::to_string(line_no),
                            "expected " + std::to_string(table.header.size()) +
                                " fields, got " + std::to_string(fields.size()));
            }
            table.rows.push_back(CsvRow{line_no, std::move(fields)});
        }
    }
    return table;
}

std::string csv_escape(const std::string& value) {
    bool needs_quotes = false;
    for (char c : value) {
        if (c == ',' || c == '"' || c == '\n') {
            needs_quotes = true;
            break;
        }
    }
    if (!value.empty() && (value.front() == ' ' || value.back() == ' ')) needs_quotes = true;
    if (!needs_quotes) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace sentibt
