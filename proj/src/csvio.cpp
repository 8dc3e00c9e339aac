#include "kdvnudge/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace kdv {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void export_csv(const std::string& path, const std::vector<std::string>& columns,
                const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("export_csv: cannot open " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) os << ',';
        os << columns[i];
    }
    os << '\n';
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::invalid_argument("export_csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << format_full(row[i]);
        }
        os << '\n';
    }
    if (!os) throw std::runtime_error("export_csv: write failed for " + path);
}

Csv read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_csv: cannot open " + path);
    Csv out;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_csv: empty file " + path);
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) out.columns.push_back(cell);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream rs(line);
        std::vector<double> row;
        while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != out.columns.size())
            throw std::runtime_error("read_csv: ragged row in " + path);
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace kdv
