#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigmak/errors.hpp"
#include "sigmak/grid.hpp"

namespace sigmak {

/// Shortest exact decimal form of a double: 17 significant digits round-trip
/// every finite IEEE value bit-exactly.
[[nodiscard]] inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Writes a field as <base>.json (grid header) plus <base>.csv (one value per
/// line, row-major). The pair round-trips exactly through read_field.
inline void write_field(const GridField& f, const std::string& base) {
    nlohmann::json header;
    header["dim"] = f.grid.dim;
    header["sizes"] =
        std::vector<int>(f.grid.sizes.begin(), f.grid.sizes.begin() + f.grid.dim);
    std::vector<std::string> lengths;
    for (int a = 0; a < f.grid.dim; ++a)
        lengths.push_back(format_double(f.grid.lengths[static_cast<std::size_t>(a)]));
    header["lengths"] = lengths;
    header["count"] = f.values.size();
    header["format"] = "csv";

    std::ofstream hj(base + ".json");
    if (!hj) throw DomainError("write_field: cannot open " + base + ".json");
    hj << header.dump(2) << "\n";

    std::ofstream cs(base + ".csv");
    if (!cs) throw DomainError("write_field: cannot open " + base + ".csv");
    for (double v : f.values) cs << format_double(v) << "\n";
}

[[nodiscard]] inline GridField read_field(const std::string& base) {
    std::ifstream hj(base + ".json");
    if (!hj) throw DomainError("read_field: cannot open " + base + ".json");
    nlohmann::json header = nlohmann::json::parse(hj);

    const int dim = header.at("dim").get<int>();
    const auto sizes = header.at("sizes").get<std::vector<int>>();
    std::vector<double> lengths;
    for (const auto& s : header.at("lengths")) lengths.push_back(std::stod(s.get<std::string>()));
    const auto count = header.at("count").get<std::size_t>();

    GridField f(TorusGrid::make(dim, sizes, lengths));
    if (f.values.size() != count)
        throw DomainError("read_field: header count does not match grid shape");

    std::ifstream cs(base + ".csv");
    if (!cs) throw DomainError("read_field: cannot open " + base + ".csv");
    std::string line;
    std::size_t i = 0;
    while (std::getline(cs, line)) {
        if (line.empty()) continue;
        if (i >= count) throw DomainError("read_field: more values than header count");
        f.values[i++] = std::stod(line);
    }
    if (i != count) throw DomainError("read_field: fewer values than header count");
    if (!f.all_finite()) throw DomainError("read_field: non-finite value in " + base + ".csv");
    return f;
}

} // namespace sigmak
