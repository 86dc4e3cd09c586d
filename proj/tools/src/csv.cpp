#include "workreal_cli/csv.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace workreal::cli {

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    if (ec != std::errc{}) throw std::runtime_error("cannot format number");
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, std::string>>& manifest,
                     const std::vector<std::string>& columns)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    for (const auto& [key, value] : manifest) out_ << "# " << key << "=" << value << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw std::runtime_error("error writing " + path_.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    CsvTable table;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos && line.size() > 2) {
                table.manifest.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
            }
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header) {
            table.columns = std::move(cells);
            header = true;
            continue;
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

double CsvTable::number(std::size_t row, std::size_t column) const {
    const std::string& c = rows.at(row).at(column);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
    if (ec != std::errc{} || ptr != c.data() + c.size()) throw std::runtime_error("non-numeric cell '" + c + "'");
    return v;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::out_of_range("no column " + name);
}

}  // namespace workreal::cli
