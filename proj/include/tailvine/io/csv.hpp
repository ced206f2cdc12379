#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tailvine {

struct Table {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    std::vector<std::string> rejected; // non-numeric columns dropped on request

    std::size_t n_rows() const { return cols.empty() ? 0 : cols[0].size(); }

    int col_index(const std::string& name) const {
        for (std::size_t j = 0; j < names.size(); ++j)
            if (names[j] == name) return static_cast<int>(j);
        return -1;
    }
};

namespace io_detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t");
    auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

} // namespace io_detail

// CSV with a header row, comma separator, dot decimal. Non-numeric columns
// are an error unless drop_non_numeric is set, in which case they are
// recorded in `rejected` and skipped.
inline Table read_csv(const std::string& path, bool drop_non_numeric = false) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

    auto headers = io_detail::split_csv_line(line);
    std::vector<std::string> names;
    for (auto& h : headers) names.push_back(io_detail::trim(h));

    std::vector<std::vector<double>> cols(names.size());
    std::vector<bool> numeric(names.size(), true);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (io_detail::trim(line).empty()) continue;
        auto cells = io_detail::split_csv_line(line);
        if (cells.size() != names.size())
            throw std::runtime_error(path + ": row " + std::to_string(row) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(names.size()));
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const std::string cell = io_detail::trim(cells[j]);
            char* end = nullptr;
            double val = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                numeric[j] = false;
                val = 0.0;
            }
            cols[j].push_back(val);
        }
    }

    Table t;
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (!numeric[j]) {
            if (!drop_non_numeric)
                throw std::runtime_error(path + ": column '" + names[j] +
                                         "' is not numeric (discrete configuration "
                                         "columns must be removed or ignored)");
            t.rejected.push_back(names[j]);
            continue;
        }
        t.names.push_back(names[j]);
        t.cols.push_back(std::move(cols[j]));
    }
    if (t.cols.empty()) throw std::runtime_error(path + ": no numeric columns");
    return t;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& cols) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t j = 0; j < names.size(); ++j)
        out << names[j] << (j + 1 == names.size() ? "\n" : ",");
    std::size_t n = cols.empty() ? 0 : cols[0].size();
    char buf[40];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", cols[j][i]);
            out << buf << (j + 1 == cols.size() ? "\n" : ",");
        }
    }
}

} // namespace tailvine
