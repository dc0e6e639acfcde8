#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gravity::csv {

// An in-memory CSV file: header plus string rows, with the physical line
// number of every row kept for error reporting.
struct Table {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<long> lines;

    // Index of a header column, -1 when absent.
    int column(const std::string& name) const;
    // Same, but a missing column is a schema error.
    int require_column(const std::string& name) const;

    const std::string& cell(std::size_t row, int col) const;
    long line(std::size_t row) const { return lines[row]; }
};

// Reads a whole file. Fields may be double-quoted (embedded commas and
// doubled quotes supported); every row must have exactly as many fields as
// the header. Throws Error(E_IO) / ParseError.
Table read_file(const std::filesystem::path& path);

// Strict scalar parsing; the whole field must be consumed. Errors carry
// "<path>:<line>: ..." plus the column name.
double to_double(const Table& t, std::size_t row, int col);
long long to_int(const Table& t, std::size_t row, int col);

// Quotes a field if it contains a comma, quote, or newline.
std::string escape(const std::string& field);
void write_row(std::ostream& os, std::span<const std::string> fields);

// Fixed numeric formats shared by all rendered outputs.
std::string fmt_sig7(double v);              // %.7g (coefficients, CIs)
std::string fmt_fixed(double v, int places); // %.Nf  (t with 2, p with 3)
std::string fmt_exact(double v);             // shortest round-trip form

} // namespace gravity::csv
