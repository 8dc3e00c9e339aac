#pragma once

#include <string>
#include <vector>

#include "kdvnudge/common.hpp"

namespace kdv {

struct Csv {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Full-precision (17 significant digits) CSV with a header row; values
// round-trip exactly through read_csv.
void export_csv(const std::string& path, const std::vector<std::string>& columns,
                const std::vector<std::vector<double>>& rows);
Csv read_csv(const std::string& path);

std::string format_full(double v);  // %.17g

}  // namespace kdv
