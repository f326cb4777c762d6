#include "railsim/core/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace railsim::core {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

void MetricsTable::append_row(std::vector<double> row) {
    if (row.size() != columns.size())
        throw std::runtime_error("metrics row width " +
                                 std::to_string(row.size()) +
                                 " != column count " +
                                 std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

int MetricsTable::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return static_cast<int>(i);
    }
    return -1;
}

void MetricsTable::check_finite() const {
    for (size_t r = 0; r < rows.size(); ++r) {
        for (size_t c = 0; c < rows[r].size(); ++c) {
            if (!std::isfinite(rows[r][c]))
                throw std::runtime_error("non-finite value in column '" +
                                         columns[c] + "' row " +
                                         std::to_string(r));
        }
    }
}

std::string MetricsTable::to_csv() const {
    std::ostringstream os;
    for (size_t c = 0; c < columns.size(); ++c) {
        if (c) os << ',';
        os << columns[c];
    }
    os << '\n';
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            os << format_double(row[c]);
        }
        os << '\n';
    }
    return os.str();
}

std::string MetricsTable::to_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = meta.scenario;
    j["seed"] = meta.seed;
    j["build_id"] = meta.build_id;
    j["wall_seconds"] = meta.wall_seconds;
    nlohmann::ordered_json cols;
    for (size_t c = 0; c < columns.size(); ++c) {
        std::vector<double> series;
        series.reserve(rows.size());
        for (const auto& row : rows) series.push_back(row[c]);
        cols[columns[c]] = series;
    }
    j["columns"] = std::move(cols);
    return j.dump(2) + "\n";
}

void write_table(const MetricsTable& table, const std::string& path,
                 TableFormat format) {
    table.check_finite();
    const std::string body =
        format == TableFormat::Csv ? table.to_csv() : table.to_json();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << body;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace railsim::core
