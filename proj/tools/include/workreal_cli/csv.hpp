#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace workreal::cli {

/// 17 significant digits, so the text parses back to the same double.
std::string format_double(double value);

/// Writes a '#'-prefixed manifest, a header row and data rows. LF line ends.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& manifest,
              const std::vector<std::string>& columns);

    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& cells);
    void close();

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::size_t columns_;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> manifest;

    double number(std::size_t row, std::size_t column) const;
    std::size_t column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace workreal::cli
