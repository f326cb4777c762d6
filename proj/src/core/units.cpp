#include "railsim/core/units.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace railsim::core {

namespace {

const std::unordered_map<std::string, double>& suffix_table() {
    static const std::unordered_map<std::string, double> table = {
        {"Hz", 1.0},     {"kHz", 1e3},    {"MHz", 1e6},   {"GHz", 1e9},
        {"THz", 1e12},   {"bps", 1.0},    {"kbps", 1e3},  {"Mbps", 1e6},
        {"Gbps", 1e9},   {"m", 1.0},      {"km", 1e3},    {"mm", 1e-3},
        {"s", 1.0},      {"ms", 1e-3},    {"us", 1e-6},   {"ns", 1e-9},
        {"m/s", 1.0},    {"km/h", 1000.0 / 3600.0},
        {"W", 1.0},      {"mW", 1e-3},
        {"dB", 1.0},     {"dBi", 1.0},
        {"rad", 1.0},    {"deg", std::numbers::pi / 180.0},
    };
    return table;
}

}  // namespace

std::optional<double> parse_quantity(std::string_view text) {
    size_t begin = 0;
    size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin])))
        ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1])))
        --end;
    if (begin == end) return std::nullopt;

    const char* first = text.data() + begin;
    const char* last = text.data() + end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{}) return std::nullopt;

    while (ptr != last && std::isspace(static_cast<unsigned char>(*ptr))) ++ptr;
    if (ptr == last) return value;

    const std::string suffix(ptr, last);
    if (suffix == "dBm") return 1e-3 * std::pow(10.0, value / 10.0);
    auto it = suffix_table().find(suffix);
    if (it == suffix_table().end()) return std::nullopt;
    return value * it->second;
}

}  // namespace railsim::core
