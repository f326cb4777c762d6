#ifndef RAILSIM_CORE_METRICS_HPP
#define RAILSIM_CORE_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace railsim::core {

enum class TableFormat { Csv, Json };

/// Column-named table of finite scalars, plus run metadata. The CSV form
/// is byte-deterministic (shortest round-trip number formatting, '.'
/// decimal, no locale); metadata travels in the JSON form only so that a
/// re-run with the same seed reproduces the CSV bytes exactly.
struct MetricsTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    struct Meta {
        std::string scenario;
        std::uint64_t seed = 0;
        std::string build_id;
        double wall_seconds = 0.0;
    } meta;

    void append_row(std::vector<double> row);
    size_t num_rows() const { return rows.size(); }
    int column_index(const std::string& name) const;  // -1 if absent

    /// Throws std::runtime_error naming the first non-finite cell.
    void check_finite() const;

    std::string to_csv() const;
    std::string to_json() const;
};

/// Writes the table to `path`, refusing tables with non-finite values.
void write_table(const MetricsTable& table, const std::string& path,
                 TableFormat format);

}  // namespace railsim::core

#endif
