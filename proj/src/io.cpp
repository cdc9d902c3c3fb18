#include "gint/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gint::io {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF on all platforms
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    for (size_t k = 0; k < table.header.size(); ++k) {
        if (k) out << ',';
        out << table.header[k];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (size_t k = 0; k < row.size(); ++k) {
            if (k) out << ',';
            out << format_double(row[k]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("read_csv: empty file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.header.size())
            throw std::runtime_error("read_csv: ragged row in " + path.string());
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace gint::io
