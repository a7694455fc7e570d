#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace marlin {

// Shortest round-trip decimal form so CSV output is bit-faithful.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char shorter[32];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            std::sscanf(shorter, "%lf", &back);
            if (back == v) return shorter;
        }
    }
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Reads a two-column `epoch,value` series file; rows must be dense from 0.
inline std::vector<double> load_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series file: " + path);
    std::vector<double> values;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (first && fields.size() >= 2 && fields[0] == "epoch") {
            first = false;
            continue;
        }
        first = false;
        if (fields.size() < 2)
            throw std::runtime_error("malformed series row in " + path + ": " + line);
        const long epoch = std::stol(fields[0]);
        if (epoch != static_cast<long>(values.size()))
            throw std::runtime_error("non-dense epoch index in " + path + ": " + line);
        values.push_back(std::stod(fields[1]));
    }
    return values;
}

inline void save_series_csv(const std::string& path, const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write series file: " + path);
    out << "epoch,value\n";
    for (std::size_t e = 0; e < values.size(); ++e)
        out << e << ',' << fmt_double(values[e]) << '\n';
}

}  // namespace marlin
