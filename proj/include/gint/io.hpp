#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gint::io {

/// Shortest decimal that round-trips a double (17 significant digits).
std::string format_double(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Comma-separated, header row, LF line endings, 17-significant-digit values.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace gint::io
