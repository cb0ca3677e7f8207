#include "mpox/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mpox {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const std::string& value)
{
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("key '" + key + "' has a non-numeric value '" +
                          value + "'");
    }
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& value)
{
    const double v = parse_number(key, value);
    if (v < 1.0 || v != static_cast<std::size_t>(v)) {
        throw ConfigError("key '" + key + "' must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

} // namespace

RunConfig parse_config(const std::string& text)
{
    RunConfig cfg;
    const std::map<std::string, std::function<void(const std::string&)>>
        setters = {
            {"theta_h", [&](const std::string& v) { cfg.params.theta_h = parse_number("theta_h", v); }},
            {"theta_r", [&](const std::string& v) { cfg.params.theta_r = parse_number("theta_r", v); }},
            {"beta_1", [&](const std::string& v) { cfg.params.beta_1 = parse_number("beta_1", v); }},
            {"beta_2", [&](const std::string& v) { cfg.params.beta_2 = parse_number("beta_2", v); }},
            {"beta_3", [&](const std::string& v) { cfg.params.beta_3 = parse_number("beta_3", v); }},
            {"alpha_1", [&](const std::string& v) { cfg.params.alpha_1 = parse_number("alpha_1", v); }},
            {"alpha_2", [&](const std::string& v) { cfg.params.alpha_2 = parse_number("alpha_2", v); }},
            {"alpha_3", [&](const std::string& v) { cfg.params.alpha_3 = parse_number("alpha_3", v); }},
            {"phi", [&](const std::string& v) { cfg.params.phi = parse_number("phi", v); }},
            {"tau", [&](const std::string& v) { cfg.params.tau = parse_number("tau", v); }},
            {"gamma", [&](const std::string& v) { cfg.params.gamma = parse_number("gamma", v); }},
            {"mu_h", [&](const std::string& v) { cfg.params.mu_h = parse_number("mu_h", v); }},
            {"mu_r", [&](const std::string& v) { cfg.params.mu_r = parse_number("mu_r", v); }},
            {"delta_h", [&](const std::string& v) { cfg.params.delta_h = parse_number("delta_h", v); }},
            {"delta_r", [&](const std::string& v) { cfg.params.delta_r = parse_number("delta_r", v); }},
            {"alpha", [&](const std::string& v) { cfg.params.alpha = parse_number("alpha", v); }},
            {"s_h0", [&](const std::string& v) { cfg.x0[kSh] = parse_number("s_h0", v); }},
            {"e_h0", [&](const std::string& v) { cfg.x0[kEh] = parse_number("e_h0", v); }},
            {"i_h0", [&](const std::string& v) { cfg.x0[kIh] = parse_number("i_h0", v); }},
            {"q_h0", [&](const std::string& v) { cfg.x0[kQh] = parse_number("q_h0", v); }},
            {"r_h0", [&](const std::string& v) { cfg.x0[kRh] = parse_number("r_h0", v); }},
            {"s_r0", [&](const std::string& v) { cfg.x0[kSr] = parse_number("s_r0", v); }},
            {"e_r0", [&](const std::string& v) { cfg.x0[kEr] = parse_number("e_r0", v); }},
            {"i_r0", [&](const std::string& v) { cfg.x0[kIr] = parse_number("i_r0", v); }},
            {"w1", [&](const std::string& v) { cfg.weights.w1 = parse_number("w1", v); }},
            {"w2", [&](const std::string& v) { cfg.weights.w2 = parse_number("w2", v); }},
            {"w3", [&](const std::string& v) { cfg.weights.w3 = parse_number("w3", v); }},
            {"max_iters", [&](const std::string& v) { cfg.max_iters = parse_count("max_iters", v); }},
            {"tolerance", [&](const std::string& v) { cfg.tolerance = parse_number("tolerance", v); }},
            {"relaxation", [&](const std::string& v) { cfg.relaxation = parse_number("relaxation", v); }},
        };

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + stripped +
                              "'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
        }
        if (value.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": key '" +
                              key + "' has no value");
        }
        it->second(value);
    }

    try {
        cfg.params.validate();
        cfg.weights.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(cfg.tolerance > 0.0)) {
        throw ConfigError("tolerance must be positive");
    }
    if (!(cfg.relaxation > 0.0) || cfg.relaxation > 1.0) {
        throw ConfigError("relaxation must lie in (0, 1]");
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

} // namespace mpox
