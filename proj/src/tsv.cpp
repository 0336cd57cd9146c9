#include "sensebridge/tsv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sensebridge/error.hpp"

namespace sensebridge::tsv {

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            return fields;
        }
        fields.emplace_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

} // namespace

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParseError("missing column '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const {
    for (const auto& h : header) {
        if (h == name) return true;
    }
    return false;
}

Table parse(std::string_view content, const std::string& origin) {
    Table table;
    std::size_t pos = 0;
    std::size_t line_number = 0;
    while (pos <= content.size()) {
        if (pos == content.size()) {
            break; // trailing newline already consumed
        }
        std::size_t nl = content.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos)
                                    ? content.substr(pos)
                                    : content.substr(pos, nl - pos);
        pos = (nl == std::string_view::npos) ? content.size() : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_number;
        if (line_number == 1) {
            table.header = split_tabs(line);
            continue;
        }
        if (line.empty()) continue; // tolerate a blank trailing line
        Row row;
        row.fields = split_tabs(line);
        row.line_number = line_number;
        if (row.fields.size() != table.header.size()) {
            throw ParseError(origin + ":" + std::to_string(line_number) + ": expected " +
                             std::to_string(table.header.size()) + " fields, got " +
                             std::to_string(row.fields.size()));
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) {
        throw ParseError(origin + ": empty file, expected a header row");
    }
    return table;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

namespace {

void check_field(const std::string& field) {
    if (field.find_first_of("\t\n\r") != std::string::npos) {
        throw SerializationError("field contains tab or newline: '" + field + "'");
    }
}

} // namespace

std::string format(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    auto append_row = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            check_field(fields[i]);
            if (i) out.push_back('\t');
            out += fields[i];
        }
        out.push_back('\n');
    };
    append_row(header);
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw SerializationError("row has " + std::to_string(row.size()) +
                                     " fields, header has " + std::to_string(header.size()));
        }
        append_row(row);
    }
    return out;
}

void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
    std::string content = format(header, rows);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SerializationError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw SerializationError("write failed for '" + path + "'");
}

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, const std::string& context) {
    double value = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw ParseError(context + ": not a number: '" + std::string(field) + "'");
    }
    return value;
}

} // namespace sensebridge::tsv
