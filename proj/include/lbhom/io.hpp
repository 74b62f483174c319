#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace lbhom {

// 17 significant digits: round-trips every double exactly.
std::string format_full(double v);

// Column-oriented table; double columns are written at full precision,
// integer columns verbatim (seeds do not fit in a double).
struct Table {
    struct Column {
        std::string name;
        std::variant<std::vector<double>, std::vector<std::int64_t>> data;
    };
    std::vector<Column> columns;

    void add(std::string name, std::vector<double> values);
    void add(std::string name, std::vector<std::int64_t> values);
    std::size_t rows() const;

    void write_csv(const std::string& path) const;
    void write_json(const std::string& path) const;
    // dispatches on format ("csv" | "json"), appends the extension
    std::string write(const std::string& path_base, const std::string& format) const;
};

struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    int column(const std::string& name) const;  // -1 when absent
};

CsvData read_csv(const std::string& path);

}  // namespace lbhom
