#include "lbhom/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lbhom {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void Table::add(std::string name, std::vector<double> values) {
    columns.push_back({std::move(name), std::move(values)});
}

void Table::add(std::string name, std::vector<std::int64_t> values) {
    columns.push_back({std::move(name), std::move(values)});
}

std::size_t Table::rows() const {
    if (columns.empty()) return 0;
    return std::visit([](const auto& v) { return v.size(); }, columns[0].data);
}

void Table::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    for (std::size_t c = 0; c < columns.size(); ++c)
        os << (c ? "," : "") << columns[c].name;
    os << '\n';
    const std::size_t n = rows();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) os << ',';
            if (auto* d = std::get_if<std::vector<double>>(&columns[c].data))
                os << format_full((*d)[r]);
            else
                os << std::get<std::vector<std::int64_t>>(columns[c].data)[r];
        }
        os << '\n';
    }
}

void Table::write_json(const std::string& path) const {
    nlohmann::ordered_json j;
    for (const auto& col : columns) {
        if (auto* d = std::get_if<std::vector<double>>(&col.data))
            j[col.name] = *d;
        else
            j[col.name] = std::get<std::vector<std::int64_t>>(col.data);
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
}

std::string Table::write(const std::string& path_base,
                         const std::string& format) const {
    if (format == "json") {
        const std::string p = path_base + ".json";
        write_json(p);
        return p;
    }
    const std::string p = path_base + ".csv";
    write_csv(p);
    return p;
}

int CsvData::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvData read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    CsvData out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (lineno == 1) {
            out.header = cells;
            out.columns.resize(cells.size());
            continue;
        }
        if (cells.size() != out.header.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected " + std::to_string(out.header.size()) +
                                     " fields, got " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            char* end = nullptr;
            const double v = std::strtod(cells[c].c_str(), &end);
            if (end == cells[c].c_str())
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": bad numeric field '" + cells[c] + "'");
            out.columns[c].push_back(v);
        }
    }
    if (out.header.empty()) throw std::runtime_error(path + ": empty csv");
    return out;
}

}  // namespace lbhom
