#ifndef RAILSIM_CORE_CONFIG_HPP
#define RAILSIM_CORE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace railsim::core {

class ConfigError : public std::runtime_error {
public:
    enum class Kind { Parse, Validation };
    ConfigError(Kind kind, const std::string& msg)
        : std::runtime_error(msg), kind(kind) {}
    Kind kind;
};

/// Registry of scenario keys. Experiments declare the keys they read
/// (with SI defaults and a one-line doc); load_scenario rejects anything
/// not declared here. Indexed families (tap lists and the like) register
/// a prefix.
class KeyRegistry {
public:
    static KeyRegistry& instance();

    void add(const std::string& key, double default_si, const std::string& doc);
    void add_prefix(const std::string& prefix, const std::string& doc);

    bool known(const std::string& key) const;
    std::optional<double> default_for(const std::string& key) const;

    struct Entry {
        double default_si;
        std::string doc;
    };
    const std::map<std::string, Entry>& keys() const { return keys_; }
    const std::map<std::string, std::string>& prefixes() const { return prefixes_; }

private:
    std::map<std::string, Entry> keys_;
    std::map<std::string, std::string> prefixes_;
};

struct ScenarioConfig {
    std::string scenario_name;
    std::uint64_t seed = 0;
    int trials = 1;
    std::string output_path;
    std::map<std::string, double> params;  // dotted keys, SI values

    /// Value from the file, else the registered default. Throws
    /// ConfigError(Validation) if the key is not registered at all.
    double get(const std::string& key) const;
    double get_or(const std::string& key, double fallback) const;
    bool has(const std::string& key) const { return params.count(key) > 0; }

    /// All file-provided params under a dotted prefix, sorted by key.
    std::vector<std::pair<std::string, double>> with_prefix(
        const std::string& prefix) const;
};

/// Loads and validates a line-oriented `key = value` scenario file.
/// Values accept unit suffixes (GHz, Mbps, km/h, ...) and are stored in SI.
ScenarioConfig load_scenario(const std::string& path);

/// Same parser on in-memory text; `origin` is used in diagnostics.
ScenarioConfig parse_scenario_text(std::string_view text,
                                   std::string_view origin);

}  // namespace railsim::core

#endif
