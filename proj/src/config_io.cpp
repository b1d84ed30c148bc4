#include "platoon/config_io.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "platoon/errors.hpp"

namespace platoon::config_io {

using nlohmann::json;
using scenario::ScenarioConfig;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.is_object()) {
            fail(path_, "must be an object");
        }
    }

    ~Reader() = default;

    /// Rejects keys that were never read.
    void finish() const
    {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.contains(key)) {
                fail(join(key), "unknown key");
            }
        }
    }

    void number(const char* key, double& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_number()) {
                fail(join(key), "must be a number");
            }
            out = v->get<double>();
        }
    }

    void integer(const char* key, int& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_number_integer()) {
                fail(join(key), "must be an integer");
            }
            out = v->get<int>();
        }
    }

    void unsigned_integer(const char* key, std::uint64_t& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_number_unsigned()) {
                fail(join(key), "must be a non-negative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void boolean(const char* key, bool& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_boolean()) {
                fail(join(key), "must be true or false");
            }
            out = v->get<bool>();
        }
    }

    std::optional<std::string> string(const char* key)
    {
        if (const json* v = get(key)) {
            if (!v->is_string()) {
                fail(join(key), "must be a string");
            }
            return v->get<std::string>();
        }
        return std::nullopt;
    }

    const json* get(const char* key)
    {
        seen_.insert(key);
        auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    [[noreturn]] static void fail(const std::string& field, const std::string& what)
    {
        throw ConfigError(field + ": " + what, field);
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_control(const json& node, const std::string& path, scenario::VehicleControl& c)
{
    Reader r(node, path);
    r.number("k_long", c.k_long);
    r.number("k_lat", c.k_lat);
    r.number("r", c.r);
    r.number("h", c.h);
    r.number("standstill_v", c.standstill_v);
    r.number("wheelbase", c.wheelbase);
    r.boolean("extended_lookahead", c.extended_lookahead);
    r.finish();
}

ScenarioConfig from_json(const json& root)
{
    Reader top(root, "");
    scenario::Preset preset = scenario::Preset::Theoretical;
    if (auto p = top.string("preset")) {
        if (*p == "theoretical") {
            preset = scenario::Preset::Theoretical;
        } else if (*p == "realistic") {
            preset = scenario::Preset::Realistic;
        } else {
            Reader::fail("preset", "must be \"theoretical\" or \"realistic\"");
        }
    }
    ScenarioConfig cfg = scenario::preset_config(preset);

    top.integer("n_vehicles", cfg.n_vehicles);
    top.number("dt", cfg.dt);
    top.number("duration", cfg.duration);
    if (auto plant = top.string("plant")) {
        if (*plant == "unicycle") {
            cfg.plant = dynamics::PlantModel::Unicycle;
        } else if (*plant == "bicycle") {
            cfg.plant = dynamics::PlantModel::Bicycle;
        } else {
            Reader::fail("plant", "must be \"unicycle\" or \"bicycle\"");
        }
    }
    if (auto channel = top.string("channel")) {
        if (*channel == "ideal") {
            cfg.channel = cosim::ChannelKind::Ideal;
        } else if (*channel == "itsg5") {
            cfg.channel = cosim::ChannelKind::Itsg5;
        } else {
            Reader::fail("channel", "must be \"ideal\" or \"itsg5\"");
        }
    }
    if (const json* node = top.get("channel_model")) {
        Reader r(*node, "channel_model");
        r.number("delay_min", cfg.channel_model.delay_min);
        r.number("delay_max", cfg.channel_model.delay_max);
        r.number("loss_prob", cfg.channel_model.loss_prob);
        r.unsigned_integer("rng_seed", cfg.channel_model.rng_seed);
        r.finish();
    }
    if (const json* node = top.get("cam_service")) {
        Reader r(*node, "cam_service");
        r.number("t_gen_min", cfg.cam_service.t_gen_min);
        r.number("t_gen_max", cfg.cam_service.t_gen_max);
        r.number("d_pos_thresh", cfg.cam_service.d_pos_thresh);
        r.number("d_speed_thresh", cfg.cam_service.d_speed_thresh);
        double heading_deg = cfg.cam_service.d_heading_thresh / kDeg;
        r.number("d_heading_thresh_deg", heading_deg);
        cfg.cam_service.d_heading_thresh = heading_deg * kDeg;
        r.finish();
    }
    if (const json* node = top.get("controller")) {
        if (node->is_array()) {
            cfg.per_vehicle.clear();
            for (std::size_t i = 0; i < node->size(); ++i) {
                scenario::VehicleControl c = cfg.controller;
                read_control((*node)[i], "controller[" + std::to_string(i) + "]", c);
                cfg.per_vehicle.push_back(c);
            }
        } else {
            read_control(*node, "controller", cfg.controller);
        }
    }
    if (const json* node = top.get("leader_profile")) {
        Reader r(*node, "leader_profile");
        r.number("ramp_time", cfg.leader_profile.ramp_time);
        if (const json* segs = r.get("segments")) {
            if (!segs->is_array()) {
                Reader::fail("leader_profile.segments", "must be an array");
            }
            cfg.leader_profile.segments.clear();
            for (std::size_t i = 0; i < segs->size(); ++i) {
                const std::string path = "leader_profile.segments[" + std::to_string(i) + "]";
                Reader s((*segs)[i], path);
                scenario::LeaderSegment seg;
                s.number("duration", seg.duration);
                s.number("target_v", seg.target_v);
                s.number("yaw_rate", seg.yaw_rate);
                s.finish();
                cfg.leader_profile.segments.push_back(seg);
            }
        }
        r.finish();
    }
    if (const json* node = top.get("noise")) {
        Reader r(*node, "noise");
        r.boolean("enabled", cfg.noise.enabled);
        r.number("sigma_pos", cfg.noise.sigma_pos);
        r.number("sigma_v", cfg.noise.sigma_v);
        double heading_deg = cfg.noise.sigma_heading / kDeg;
        r.number("sigma_heading_deg", heading_deg);
        cfg.noise.sigma_heading = heading_deg * kDeg;
        r.finish();
    }
    top.unsigned_integer("seed", cfg.seed);
    if (const json* node = top.get("initial_spacing")) {
        if (!node->is_number()) {
            Reader::fail("initial_spacing", "must be a number");
        }
        cfg.initial_spacing = node->get<double>();
    }
    if (const json* node = top.get("metrics")) {
        Reader r(*node, "metrics");
        r.number("transient_fraction", cfg.metrics.transient_fraction);
        r.number("settle_time", cfg.metrics.settle_time);
        r.number("steady_window", cfg.metrics.steady_window);
        r.finish();
    }
    top.finish();
    cfg.validate();
    return cfg;
}

} // namespace

int locate_field_line(const std::string& text, const std::string& field)
{
    static const std::regex token(R"(([A-Za-z_][A-Za-z0-9_]*)(?:\[(\d+)\])?)");
    std::size_t pos = 0;
    int skip = 0; // array index carried over to the next key
    bool found_any = false;
    for (auto it = std::sregex_iterator(field.begin(), field.end(), token); it != std::sregex_iterator();
         ++it) {
        const std::string quoted = "\"" + (*it)[1].str() + "\"";
        for (int k = 0; k <= skip; ++k) {
            const std::size_t hit = text.find(quoted, pos);
            if (hit == std::string::npos) {
                return 0;
            }
            pos = hit + quoted.size();
        }
        found_any = true;
        skip = (*it)[2].matched ? std::stoi((*it)[2].str()) : 0;
    }
    if (!found_any) {
        return 0;
    }
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

ScenarioConfig parse_config(const std::string& text, const std::string& source)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": invalid JSON: " + e.what());
    }
    try {
        return from_json(root);
    } catch (const ConfigError& e) {
        const int line = e.field().empty() ? 0 : locate_field_line(text, e.field());
        const std::string where = line > 0 ? source + ":" + std::to_string(line) : source;
        throw ConfigError(where + ": " + e.what(), e.field());
    }
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

} // namespace platoon::config_io
