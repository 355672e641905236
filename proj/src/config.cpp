#include "evkws/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "evkws/error.hpp"

namespace evkws {
namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"sensor", {"channels", "topology"}},
        {"filtration", {"enabled", "div_factor", "weight", "threshold.kind", "threshold.start", "threshold.end"}},
        {"graph", {"r_c", "skip_step", "r_t_low", "r_t_high", "same_channel"}},
        {"model", {"weights", "random_seed", "class_count"}},
        {"hw",
         {"clock_hz", "parallel_multipliers", "fifo_depth", "nas_latency_us", "head_latency_us", "cycle_base",
          "cycle_per_vertex", "window_us", "closure", "flush_timeout_us"}},
        {"io", {"format", "output"}},
    };
    return keys;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

class Reader {
public:
    explicit Reader(const ConfigMap& map) : map_(map) {}

    const std::string* find(const std::string& section, const std::string& key) const {
        auto s = map_.find(section);
        if (s == map_.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    template <typename T>
    bool get(const std::string& section, const std::string& key, T& out) const {
        const std::string* raw = find(section, key);
        if (!raw) return false;
        const std::string v = trim(*raw);
        if (v.find(',') != std::string::npos) {
            throw ConfigError(section + "." + key + " holds a value list; use the ablate command to sweep it");
        }
        if constexpr (std::is_same_v<T, std::string>) {
            out = v;
        } else if constexpr (std::is_same_v<T, bool>) {
            if (v == "true" || v == "1" || v == "yes" || v == "on") out = true;
            else if (v == "false" || v == "0" || v == "no" || v == "off") out = false;
            else throw ConfigError(section + "." + key + ": expected a boolean, got '" + v + "'");
        } else {
            T value{};
            auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
            if (ec != std::errc() || ptr != v.data() + v.size()) {
                throw ConfigError(section + "." + key + ": cannot parse '" + v + "'");
            }
            out = value;
        }
        return true;
    }

private:
    const ConfigMap& map_;
};

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParseError("config: " + e.message(), e.line());
    }
    ConfigMap map;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("config: key '" + section + "' outside a section");
        }
        auto& dst = map[section];
        for (const auto& [key, value] : body) dst[key] = value.data();
    }
    for (const auto& [section, body] : map) {
        auto known = known_keys().find(section);
        if (known == known_keys().end()) throw ConfigError("config: unknown section [" + section + "]");
        for (const auto& [key, value] : body) {
            if (!known->second.count(key)) throw ConfigError("config: unknown key " + section + "." + key);
        }
    }
    return map;
}

ConfigMap load_config_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void apply_overrides(ConfigMap& map, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        const auto dot = o.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            throw ConfigError("override '" + o + "' must look like section.key=value");
        }
        const std::string section = o.substr(0, dot);
        const std::string key = o.substr(dot + 1, eq - dot - 1);
        auto known = known_keys().find(section);
        if (known == known_keys().end() || !known->second.count(key)) {
            throw ConfigError("override names unknown key " + section + "." + key);
        }
        map[section][key] = o.substr(eq + 1);
    }
}

std::string to_ini(const ConfigMap& map) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [section, body] : map) {
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        for (const auto& [key, value] : body) out << key << " = " << trim(value) << '\n';
    }
    return out.str();
}

std::vector<ConfigMap> expand_sweep(const ConfigMap& map) {
    std::vector<ConfigMap> out{map};
    for (const auto& [section, body] : map) {
        for (const auto& [key, raw] : body) {
            std::vector<std::string> values;
            std::stringstream ss(raw);
            for (std::string item; std::getline(ss, item, ',');) values.push_back(trim(item));
            if (values.size() < 2) continue;
            std::vector<ConfigMap> next;
            next.reserve(out.size() * values.size());
            for (const auto& base : out) {
                for (const auto& v : values) {
                    if (v.empty()) throw ConfigError("empty value in sweep list " + section + "." + key);
                    ConfigMap m = base;
                    m[section][key] = v;
                    next.push_back(std::move(m));
                }
            }
            out = std::move(next);
        }
    }
    return out;
}

GraphParams default_graph_params(unsigned channels) {
    GraphParams g;
    g.r_t_low = 0;
    g.r_t_high = 5000;
    if (channels <= 32) {
        g.r_c = 5;
        g.skip_step = 1;
    } else if (channels <= 64) {
        g.r_c = 10;
        g.skip_step = 1;
    } else {
        g.r_c = 20;
        g.skip_step = 2;
    }
    return g;
}

std::optional<FiltrationParams> RunConfig::filtration() const {
    if (!filtration_enabled) return std::nullopt;
    return FiltrationParams::from_schedule(div_factor, weight, schedule, sensor.channels);
}

void RunConfig::validate() const {
    try {
        sensor.validate();
        graph.validate();
        hw.validate();
        if (auto f = filtration()) f->validate(sensor.channels);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (graph.r_c >= sensor.channels) {
        throw ConfigError("graph.r_c " + std::to_string(graph.r_c) + " must be smaller than the " +
                          std::to_string(sensor.channels) + " sensor channels");
    }
    if (class_count < 1) throw ConfigError("model.class_count must be >= 1");
}

RunConfig resolve_config(const ConfigMap& map, const std::filesystem::path& base_dir) {
    Reader r(map);
    RunConfig c;
    unsigned channels = c.sensor.channels;
    r.get("sensor", "channels", channels);
    if (!SensorConfig::supported_channel_count(channels)) {
        throw ConfigError("sensor.channels must be 32, 64 or 128");
    }
    c.sensor.channels = static_cast<std::uint16_t>(channels);
    std::string text;
    if (r.get("sensor", "topology", text)) c.sensor.topology = parse_topology(text);

    r.get("filtration", "enabled", c.filtration_enabled);
    r.get("filtration", "div_factor", c.div_factor);
    r.get("filtration", "weight", c.weight);
    if (r.get("filtration", "threshold.kind", text)) c.schedule.kind = parse_schedule_kind(text);
    r.get("filtration", "threshold.start", c.schedule.start);
    r.get("filtration", "threshold.end", c.schedule.end);

    c.graph = default_graph_params(c.sensor.channels);
    r.get("graph", "r_c", c.graph.r_c);
    r.get("graph", "skip_step", c.graph.skip_step);
    r.get("graph", "r_t_low", c.graph.r_t_low);
    r.get("graph", "r_t_high", c.graph.r_t_high);
    r.get("graph", "same_channel", c.graph.same_channel);

    if (r.get("model", "weights", text) && !text.empty()) {
        std::filesystem::path p = text;
        c.weights_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    r.get("model", "random_seed", c.random_seed);
    r.get("model", "class_count", c.class_count);

    r.get("hw", "clock_hz", c.hw.clock_hz);
    r.get("hw", "parallel_multipliers", c.hw.parallel_multipliers);
    r.get("hw", "fifo_depth", c.hw.fifo_depth);
    r.get("hw", "nas_latency_us", c.hw.nas_latency_us);
    r.get("hw", "head_latency_us", c.hw.head_latency_us);
    r.get("hw", "cycle_base", c.hw.cycle_base);
    r.get("hw", "cycle_per_vertex", c.hw.cycle_per_vertex);
    r.get("hw", "window_us", c.hw.window_us);
    r.get("hw", "flush_timeout_us", c.hw.flush_timeout_us);
    if (r.get("hw", "closure", text)) {
        if (text == "boundary_marker") c.hw.closure = WindowClosure::boundary_marker;
        else if (text == "next_event") c.hw.closure = WindowClosure::next_event;
        else throw ConfigError("hw.closure must be boundary_marker or next_event");
    }

    if (r.get("io", "format", text) && !text.empty()) c.format = parse_stream_format(text);
    if (r.get("io", "output", text) && !text.empty()) c.output = text;

    c.validate();
    return c;
}

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["sensor"] = {{"channels", c.sensor.channels}, {"topology", to_string(c.sensor.topology)}};
    j["filtration"] = {{"enabled", c.filtration_enabled},
                       {"div_factor", c.div_factor},
                       {"weight", c.weight},
                       {"threshold", {{"kind", to_string(c.schedule.kind)},
                                      {"start", c.schedule.start},
                                      {"end", c.schedule.end}}}};
    if (auto f = c.filtration()) j["filtration"]["thresholds"] = f->thresholds;
    j["graph"] = {{"r_c", c.graph.r_c},
                  {"skip_step", c.graph.skip_step},
                  {"r_t_low", c.graph.r_t_low},
                  {"r_t_high", c.graph.r_t_high},
                  {"same_channel", c.graph.same_channel}};
    j["model"] = {{"weights", c.weights_path ? nlohmann::json(c.weights_path->string()) : nlohmann::json(nullptr)},
                  {"random_seed", c.random_seed},
                  {"class_count", c.class_count}};
    j["hw"] = to_json(c.hw);
    j["io"] = {{"format", c.format ? nlohmann::json(*c.format == StreamFormat::csv ? "csv" : "binary")
                                   : nlohmann::json("auto")},
               {"output", c.output ? nlohmann::json(c.output->string()) : nlohmann::json(nullptr)}};
    return j;
}

}  // namespace evkws
