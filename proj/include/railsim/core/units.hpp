#ifndef RAILSIM_CORE_UNITS_HPP
#define RAILSIM_CORE_UNITS_HPP

#include <optional>
#include <string>
#include <string_view>

namespace railsim::core {

/// Parses "340 GHz", "500Mbps", "300 km/h", "2.5", ... into an SI value.
/// Returns nullopt when the text is not a number with an optional known
/// suffix. Supported suffixes:
///   Hz kHz MHz GHz THz | bps kbps Mbps Gbps | m km mm | s ms us ns
///   km/h m/s | W mW dBm | dB dBi | deg rad
std::optional<double> parse_quantity(std::string_view text);

}  // namespace railsim::core

#endif
