#include "railsim/core/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "railsim/core/units.hpp"

namespace railsim::core {

namespace {

std::string_view trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void parse_fail(std::string_view origin, int line,
                             const std::string& what) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << what;
    throw ConfigError(ConfigError::Kind::Parse, os.str());
}

[[noreturn]] void validation_fail(const std::string& what) {
    throw ConfigError(ConfigError::Kind::Validation, what);
}

}  // namespace

KeyRegistry& KeyRegistry::instance() {
    static KeyRegistry reg;
    return reg;
}

void KeyRegistry::add(const std::string& key, double default_si,
                      const std::string& doc) {
    keys_[key] = Entry{default_si, doc};
}

void KeyRegistry::add_prefix(const std::string& prefix, const std::string& doc) {
    prefixes_[prefix] = doc;
}

bool KeyRegistry::known(const std::string& key) const {
    if (keys_.count(key)) return true;
    for (const auto& [prefix, doc] : prefixes_) {
        if (key.rfind(prefix, 0) == 0) return true;
    }
    return false;
}

std::optional<double> KeyRegistry::default_for(const std::string& key) const {
    auto it = keys_.find(key);
    if (it == keys_.end()) return std::nullopt;
    return it->second.default_si;
}

double ScenarioConfig::get(const std::string& key) const {
    auto it = params.find(key);
    if (it != params.end()) return it->second;
    auto def = KeyRegistry::instance().default_for(key);
    if (!def)
        validation_fail("scenario key '" + key + "' has no value and no default");
    return *def;
}

double ScenarioConfig::get_or(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it != params.end() ? it->second : fallback;
}

std::vector<std::pair<std::string, double>> ScenarioConfig::with_prefix(
    const std::string& prefix) const {
    std::vector<std::pair<std::string, double>> out;
    for (auto it = params.lower_bound(prefix); it != params.end(); ++it) {
        if (it->first.rfind(prefix, 0) != 0) break;
        out.emplace_back(it->first, it->second);
    }
    return out;
}

ScenarioConfig parse_scenario_text(std::string_view text,
                                   std::string_view origin) {
    ScenarioConfig cfg;
    bool have_name = false;
    bool have_seed = false;

    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                          : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        if (size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            parse_fail(origin, line_no, "expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) parse_fail(origin, line_no, "empty key");
        if (value.empty()) parse_fail(origin, line_no, "empty value for '" + key + "'");

        if (key == "scenario_name") {
            cfg.scenario_name = value;
            have_name = true;
        } else if (key == "seed") {
            std::uint64_t seed = 0;
            auto [p, ec] =
                std::from_chars(value.data(), value.data() + value.size(), seed);
            if (ec != std::errc{} || p != value.data() + value.size())
                parse_fail(origin, line_no, "seed must be an unsigned integer");
            cfg.seed = seed;
            have_seed = true;
        } else if (key == "trials") {
            int trials = 0;
            auto [p, ec] = std::from_chars(value.data(),
                                           value.data() + value.size(), trials);
            if (ec != std::errc{} || p != value.data() + value.size())
                parse_fail(origin, line_no, "trials must be an integer");
            cfg.trials = trials;
        } else if (key == "output_path") {
            cfg.output_path = value;
        } else {
            auto qty = parse_quantity(value);
            if (!qty)
                parse_fail(origin, line_no,
                           "cannot parse value '" + value + "' for '" + key + "'");
            if (!std::isfinite(*qty))
                validation_fail("key '" + key + "' is not finite");
            if (!KeyRegistry::instance().known(key))
                validation_fail("unknown scenario key '" + key + "'");
            cfg.params[key] = *qty;
        }
    }

    if (!have_name) validation_fail("missing required key 'scenario_name'");
    if (!have_seed) validation_fail("missing required key 'seed'");
    if (cfg.trials < 1) validation_fail("key 'trials' must be >= 1");
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(ConfigError::Kind::Parse,
                          "cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

}  // namespace railsim::core
