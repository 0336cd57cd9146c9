#ifndef SENSEBRIDGE_TSV_HPP
#define SENSEBRIDGE_TSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace sensebridge::tsv {

struct Row {
    std::vector<std::string> fields;
    std::size_t line_number = 0; // 1-based, header is line 1
};

struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;

    // Index of a header column; throws ParseError when absent.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
};

// Reads a UTF-8 tab-separated file with one header row. Every data row must
// have exactly as many fields as the header; otherwise ParseError naming the
// line number. Throws ParseError when the file cannot be opened.
Table read_file(const std::string& path);

// Same, from an in-memory buffer (used by tests and cache parsing).
Table parse(std::string_view content, const std::string& origin);

// Joins fields with tabs, one row per line, trailing newline. Fields must not
// contain tab/newline/carriage-return; offenders raise SerializationError.
std::string format(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

// format() + atomic-ish write (write then rename is overkill here; plain
// truncating write). Throws SerializationError on I/O failure.
void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double value);

// Strict double parse of a whole field; throws ParseError on garbage.
double parse_double(std::string_view field, const std::string& context);

} // namespace sensebridge::tsv

#endif
