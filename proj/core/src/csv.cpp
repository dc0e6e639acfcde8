#include "gravity/csv.hpp"

#include "gravity/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace gravity::csv {
namespace {

// Splits one physical line. Quoted fields may contain commas and doubled
// quotes; a quote inside an unquoted field or trailing junk after a closing
// quote is malformed.
std::vector<std::string> split_line(const std::string& path, long line_no,
                                    const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool was_quoted = false;
    std::size_t i = 0;
    while (i <= line.size()) {
        if (i == line.size()) {
            if (in_quotes)
                throw ParseError(path, line_no, "unterminated quoted field");
            fields.push_back(field);
            break;
        }
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            if (!field.empty() || was_quoted)
                throw ParseError(path, line_no, "quote inside unquoted field");
            in_quotes = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
            was_quoted = false;
        } else {
            if (was_quoted)
                throw ParseError(path, line_no, "content after closing quote");
            field += c;
        }
        ++i;
    }
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

} // namespace

int Table::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

int Table::require_column(const std::string& name) const {
    int c = column(name);
    if (c < 0)
        throw ParseError::schema(path, "missing required column '" + name + "'");
    return c;
}

const std::string& Table::cell(std::size_t row, int col) const {
    return rows[row][static_cast<std::size_t>(col)];
}

Table read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("E_IO", "cannot open '" + path.string() + "'");

    Table t;
    t.path = path.string();
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line_no == 1) {
            t.header = split_line(t.path, line_no, line);
            if (t.header.empty() || (t.header.size() == 1 && t.header[0].empty()))
                throw ParseError(t.path, 1, "empty header");
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_line(t.path, line_no, line);
        if (fields.size() != t.header.size())
            throw ParseError(t.path, line_no,
                             "expected " + std::to_string(t.header.size()) +
                                 " fields, got " + std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
        t.lines.push_back(line_no);
    }
    if (line_no == 0)
        throw ParseError(t.path, 1, "empty file");
    return t;
}

double to_double(const Table& t, std::size_t row, int col) {
    const std::string& s = t.cell(row, col);
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw ParseError(t.path, t.line(row),
                         "column '" + t.header[static_cast<std::size_t>(col)] +
                             "': not a finite number: '" + s + "'");
    return v;
}

long long to_int(const Table& t, std::size_t row, int col) {
    const std::string& s = t.cell(row, col);
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError(t.path, t.line(row),
                         "column '" + t.header[static_cast<std::size_t>(col)] +
                             "': not an integer: '" + s + "'");
    return v;
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& os, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << escape(fields[i]);
    }
    os << '\n';
}

std::string fmt_sig7(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.7g", v);
    return buf;
}

std::string fmt_fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

std::string fmt_exact(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

} // namespace gravity::csv
