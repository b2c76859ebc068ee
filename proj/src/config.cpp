#include "mqj/config.hpp"

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mqj {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view raw) {
    const std::string text = trim(raw);
    T value{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last)
        throw ConfigError("invalid value for '" + std::string(key) + "': '" + text + "'");
    return value;
}

std::vector<double> parse_list(std::string_view key, std::string_view raw) {
    std::vector<double> out;
    std::string_view rest = raw;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(parse_number<double>(key, rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

std::string format_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

struct Key {
    const char* section;
    const char* name;
    const char* flag;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Key number_key(const char* section, const char* name, const char* flag, T RunConfig::*member) {
    return {section, name, flag,
            [=](RunConfig& c, std::string_view v) { c.*member = parse_number<T>(name, v); },
            [=](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>)
                    return format_double(c.*member);
                else
                    return std::to_string(c.*member);
            }};
}

template <typename T>
Key model_key(const char* name, const char* flag, T ModelParams::*member) {
    return {"model", name, flag,
            [=](RunConfig& c, std::string_view v) { c.model.*member = parse_number<T>(name, v); },
            [=](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>)
                    return format_double(c.model.*member);
                else
                    return std::to_string(c.model.*member);
            }};
}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        model_key("g", "--g", &ModelParams::g),
        model_key("kappa", "--kappa", &ModelParams::kappa),
        model_key("gamma0", "--gamma0", &ModelParams::gamma0),
        model_key("gamma1", "--gamma1", &ModelParams::gamma1),
        model_key("omega_l", "--omega-l", &ModelParams::omega_l),
        model_key("omega_m", "--omega-m", &ModelParams::omega_m),
        model_key("delta", "--delta", &ModelParams::delta),
        model_key("n_max", "--nmax", &ModelParams::n_max),
        {"run", "kind", nullptr,
         [](RunConfig& c, std::string_view v) {
             const auto kind = parse_experiment(trim(v));
             if (!kind) throw ConfigError("invalid value for 'kind': '" + trim(v) + "'");
             c.kind = kind;
         },
         [](const RunConfig& c) { return c.kind ? std::string(experiment_name(*c.kind)) : ""; }},
        number_key("run", "n_traj", "--n-traj", &RunConfig::n_traj),
        number_key("run", "horizon_tdark", "--horizon-tdark", &RunConfig::horizon_tdark),
        number_key("run", "seed", "--seed", &RunConfig::seed),
        {"run", "eta", "--eta", [](RunConfig& c, std::string_view v) { c.eta = parse_list("eta", v); },
         [](const RunConfig& c) { return format_list(c.eta); }},
        {"run", "t_wait", "--t-wait",
         [](RunConfig& c, std::string_view v) { c.t_wait = parse_list("t_wait", v); },
         [](const RunConfig& c) { return format_list(c.t_wait); }},
        {"run", "out", "--out", [](RunConfig& c, std::string_view v) { c.out = trim(v); },
         [](const RunConfig& c) { return c.out; }},
        number_key("run", "workers", "--workers", &RunConfig::workers),
        number_key("telegraph", "gap_factor", "--gap-factor", &RunConfig::gap_factor),
        number_key("telegraph", "bin_tdark", "--bin-tdark", &RunConfig::bin_tdark),
        {"telegraph", "channels", "--channels",
         [](RunConfig& c, std::string_view v) { c.channels = parse_channel_mask(v); },
         [](const RunConfig& c) { return channel_mask_text(c.channels); }},
    };
    return table;
}

const Key* find_key(std::string_view section, std::string_view name) {
    for (const auto& k : keys())
        if (section == k.section && name == k.name) return &k;
    return nullptr;
}

}  // namespace

std::string_view experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::analytic: return "analytic";
        case ExperimentKind::validate: return "validate";
        case ExperimentKind::simulate: return "simulate";
        case ExperimentKind::telegraph: return "telegraph";
        case ExperimentKind::fidelity: return "fidelity";
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name) {
    for (auto k : {ExperimentKind::analytic, ExperimentKind::validate, ExperimentKind::simulate,
                   ExperimentKind::telegraph, ExperimentKind::fidelity})
        if (experiment_name(k) == name) return k;
    return std::nullopt;
}

std::string channel_mask_text(unsigned mask) {
    std::string out;
    for (int c = 0; c < 5; ++c) {
        if (!((mask >> c) & 1u)) continue;
        if (!out.empty()) out += ", ";
        out += channel_name(static_cast<ChannelId>(c));
    }
    return out;
}

unsigned parse_channel_mask(std::string_view text) {
    unsigned mask = 0;
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        const std::string name = trim(rest.substr(0, comma));
        if (name == "all") {
            mask |= 0x1fu;
        } else {
            bool found = false;
            for (int c = 0; c < 5; ++c) {
                if (channel_name(static_cast<ChannelId>(c)) == name) {
                    mask |= 1u << c;
                    found = true;
                }
            }
            if (!found) throw ConfigError("invalid value for 'channels': '" + name + "'");
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return mask;
}

RunConfig parse_config_text(std::string_view text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.message() + " (line " +
                          std::to_string(e.line()) + ")");
    }
    RunConfig config;
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) throw ConfigError("key '" + section + "' is outside a section");
        for (const auto& [name, value] : body) {
            const Key* key = find_key(section, name);
            if (!key) throw ConfigError("unknown key '" + section + "." + name + "'");
            key->set(config, value.data());
        }
    }
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream out;
    std::string section;
    for (const auto& key : keys()) {
        if (section != key.section) {
            if (!section.empty()) out << '\n';
            section = key.section;
            out << '[' << section << "]\n";
        }
        const std::string value = key.get(config);
        if (std::string_view(key.name) == "kind" && value.empty()) continue;
        out << key.name << " = " << value << '\n';
    }
    return out.str();
}

void validate_config(const RunConfig& c) {
    c.model.validate();
    if (!c.kind) throw ConfigError("missing required experiment kind (run.kind)");
    if (c.n_traj < 1) throw ConfigError("n_traj must be >= 1");
    if (!(c.horizon_tdark > 0.0)) throw ConfigError("horizon_tdark must be > 0");
    if (c.eta.empty()) throw ConfigError("eta must list at least one value");
    for (double e : c.eta)
        if (!(e > 0.0 && e <= 1.0)) throw ConfigError("eta out of range (0, 1]: " + format_double(e));
    if (c.t_wait.empty()) throw ConfigError("t_wait must list at least one value");
    for (double t : c.t_wait)
        if (!(t >= 0.0) || !std::isfinite(t))
            throw ConfigError("t_wait out of range [0, inf): " + format_double(t));
    if (!(c.gap_factor > 0.0)) throw ConfigError("gap_factor must be > 0");
    if (!(c.bin_tdark > 0.0)) throw ConfigError("bin_tdark must be > 0");
    if (c.channels == 0 || c.channels > 0x1fu) throw ConfigError("channels must select a channel");
    if (c.out.empty()) throw ConfigError("out must be a directory path");
}

CommandLine parse_command_line(int argc, const char* const* argv) {
    CLI::App app{"Macroscopic quantum jump simulator", "mqj"};
    std::string kind;
    std::string config_path;
    app.add_option("kind", kind, "analytic | validate | simulate | telegraph | fidelity");
    app.add_option("--config", config_path, "sectioned key = value config file");
    std::map<std::string, std::string> flag_values;
    for (const auto& key : keys()) {
        if (!key.flag) continue;
        app.add_option(key.flag, flag_values[key.flag],
                       std::string(key.section) + "." + key.name);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        return {RunConfig{}, app.help()};
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    CommandLine result;
    if (!config_path.empty()) result.config = load_config_file(config_path);
    for (const auto& key : keys()) {
        if (key.flag && app.count(key.flag) > 0) key.set(result.config, flag_values[key.flag]);
    }
    if (!kind.empty()) find_key("run", "kind")->set(result.config, kind);
    validate_config(result.config);
    return result;
}

}  // namespace mqj
