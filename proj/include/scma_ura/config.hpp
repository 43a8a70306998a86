#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "sim.hpp"

namespace scma_ura {

/// Flat `key = value` configuration. Lines starting with '#' and blank
/// lines are ignored; later assignments override earlier ones.
class ConfigMap {
public:
    static const std::vector<std::string>& known_keys()
    {
        static const std::vector<std::string> keys = {
            "codebook",
            "sim.seed", "sim.replications", "sim.slots", "sim.threads", "sim.groups",
            "frame.slots", "frame.count",
            "arrival.mode", "arrival.rate",
            "sweep.start", "sweep.stop", "sweep.step",
            "barring.enabled", "barring.initial_alpha",
            "decoder.policy", "decoder.observability",
            "theory.start", "theory.stop", "theory.step",
            "groups.list", "groups.load",
            "oracle.max_users", "oracle.rates", "oracle.mc_slots",
            "trace.path", "trace.slots",
        };
        return keys;
    }

    void set(const std::string& key, const std::string& value)
    {
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw Error(ErrorCode::InvalidConfig, "unknown configuration key '" + key + "'");
        values_[key] = value;
    }

    /// Parses "key=value" (as given on the command line).
    void set_override(std::string_view assignment)
    {
        const auto eq = assignment.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::InvalidConfig, "override '" + std::string(assignment) + "' is not of the form key=value");
        set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
    }

    void parse(std::istream& in)
    {
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t.front() == '#')
                continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": expected 'key = value'");
            set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
        }
    }

    void load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::InvalidConfig, "cannot open config file '" + path + "'");
        parse(in);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback) const
    {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const
    {
        if (!has(key))
            return fallback;
        return to_double(key, values_.at(key));
    }

    long long get_int(const std::string& key, long long fallback) const
    {
        if (!has(key))
            return fallback;
        const std::string& v = values_.at(key);
        long long out = 0;
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size())
            throw Error(ErrorCode::InvalidConfig, key + ": '" + v + "' is not an integer");
        return out;
    }

    bool get_bool(const std::string& key, bool fallback) const
    {
        if (!has(key))
            return fallback;
        const std::string& v = values_.at(key);
        if (v == "true" || v == "1" || v == "on" || v == "yes")
            return true;
        if (v == "false" || v == "0" || v == "off" || v == "no")
            return false;
        throw Error(ErrorCode::InvalidConfig, key + ": '" + v + "' is not a boolean");
    }

    std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const
    {
        if (!has(key))
            return fallback;
        std::vector<double> out;
        std::stringstream ss(values_.at(key));
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(to_double(key, trim(item)));
        return out;
    }

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    static std::string trim(std::string_view s)
    {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string_view::npos)
            return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return std::string(s.substr(b, e - b + 1));
    }

private:
    static double to_double(const std::string& key, const std::string& v)
    {
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size())
                throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidConfig, key + ": '" + v + "' is not a number");
        }
    }

    std::map<std::string, std::string> values_;
};

inline DecoderPolicy parse_policy(const std::string& s)
{
    if (s == "component")
        return DecoderPolicy::ComponentWise;
    if (s == "all-or-nothing")
        return DecoderPolicy::AllOrNothing;
    if (s == "jmpa-only")
        return DecoderPolicy::JmpaOnly;
    throw Error(ErrorCode::InvalidConfig, "decoder.policy: '" + s + "' (expected component, all-or-nothing or jmpa-only)");
}

inline ObservabilityRule parse_observability(const std::string& s)
{
    if (s == "direct")
        return ObservabilityRule::Direct;
    if (s == "post-decode")
        return ObservabilityRule::PostDecode;
    throw Error(ErrorCode::InvalidConfig, "decoder.observability: '" + s + "' (expected direct or post-decode)");
}

inline ArrivalMode parse_arrival_mode(const std::string& s)
{
    if (s == "fixed")
        return ArrivalMode::Fixed;
    if (s == "sweep")
        return ArrivalMode::Sweep;
    if (s == "schedule")
        return ArrivalMode::Schedule;
    throw Error(ErrorCode::InvalidConfig, "arrival.mode: '" + s + "' (expected fixed, sweep or schedule)");
}

/// Overlays the simulation keys of `map` onto `base`.
inline SimConfig to_sim_config(const ConfigMap& map, SimConfig base = {})
{
    SimConfig c = std::move(base);
    c.codebook = map.get("codebook", c.codebook);
    c.seed = static_cast<std::uint64_t>(map.get_int("sim.seed", static_cast<long long>(c.seed)));
    c.replications = static_cast<int>(map.get_int("sim.replications", c.replications));
    c.slots_per_replication = map.get_int("sim.slots", c.slots_per_replication);
    c.threads = static_cast<int>(map.get_int("sim.threads", c.threads));
    c.n_groups = static_cast<int>(map.get_int("sim.groups", c.n_groups));
    c.slots_per_frame = static_cast<int>(map.get_int("frame.slots", c.slots_per_frame));
    c.n_frames = static_cast<int>(map.get_int("frame.count", c.n_frames));
    if (map.has("arrival.mode"))
        c.arrival = parse_arrival_mode(map.get("arrival.mode", ""));
    c.rate = map.get_double("arrival.rate", c.rate);
    c.sweep.start = map.get_double("sweep.start", c.sweep.start);
    c.sweep.stop = map.get_double("sweep.stop", c.sweep.stop);
    c.sweep.step = map.get_double("sweep.step", c.sweep.step);
    c.barring = map.get_bool("barring.enabled", c.barring);
    c.initial_alpha = map.get_double("barring.initial_alpha", c.initial_alpha);
    if (map.has("decoder.policy"))
        c.policy = parse_policy(map.get("decoder.policy", ""));
    if (map.has("decoder.observability"))
        c.observability = parse_observability(map.get("decoder.observability", ""));
    c.validate();
    return c;
}

} // namespace scma_ura
