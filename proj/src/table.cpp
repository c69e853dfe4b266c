#include "evhc/table.hpp"

#include "evhc/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace evhc {

namespace {

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

}  // namespace

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw ConfigError("missing column '" + std::string(name) + "'");
}

Table parse_csv(std::string_view text) {
    Table table;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        const auto line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto cells = split_row(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(table.header.size()) + " cells, found " +
                              std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) {
        throw ConfigError("table has no header row");
    }
    return table;
}

double parse_double(std::string_view cell, std::string_view where) {
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw ConfigError(std::string(where) + ": not a number: '" + std::string(cell) + "'");
    }
    return value;
}

long long parse_int(std::string_view cell, std::string_view where) {
    long long value = 0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(std::string(where) + ": not an integer: '" + std::string(cell) + "'");
    }
    return value;
}

std::string format_fixed(double value, int decimals) {
    if (std::isnan(value)) {
        return "nan";
    }
    // Avoid "-0.000000" for tiny negatives so reruns diff cleanly.
    const double scale = std::pow(10.0, decimals);
    if (std::abs(value) * scale < 0.5) {
        value = 0.0;
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
    if (ec != std::errc{}) {
        return std::to_string(value);
    }
    return std::string(buf, ptr);
}

std::string format_shortest(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) {
        return std::to_string(value);
    }
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (auto& h : header) {
        cell(h);
    }
    end_row();
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    if (filled_ > 0) {
        out_ += ',';
    }
    out_ += text;
    ++filled_;
    return *this;
}

CsvWriter& CsvWriter::cell(double value, int decimals) { return cell(format_fixed(value, decimals)); }

CsvWriter& CsvWriter::cell(long long value) { return cell(std::to_string(value)); }

void CsvWriter::end_row() {
    if (filled_ != columns_) {
        throw std::logic_error("csv row has " + std::to_string(filled_) + " cells, expected " +
                               std::to_string(columns_));
    }
    out_ += '\n';
    filled_ = 0;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw SimulationError("cannot write '" + path.string() + "'");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace evhc
