#include "platoon/scenario.hpp"

#include <cmath>
#include <algorithm>
#include <exception>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "platoon/errors.hpp"
#include "platoon/sweep.hpp"

namespace platoon::scenario {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok) {
        throw ConfigError(field + ": " + what, field);
    }
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

// start time of each segment
std::vector<double> segment_starts(const LeaderProfile& profile)
{
    std::vector<double> starts;
    double t = 0.0;
    for (const auto& seg : profile.segments) {
        starts.push_back(t);
        t += seg.duration;
    }
    return starts;
}

std::size_t segment_index(const std::vector<double>& starts, double t)
{
    std::size_t k = 0;
    while (k + 1 < starts.size() && t >= starts[k + 1]) {
        ++k;
    }
    return k;
}

} // namespace

// --- LeaderProfile ------------------------------------------------------------

void LeaderProfile::validate() const
{
    if (segments.empty()) {
        throw ArgumentError("leader profile has no segments");
    }
    if (!finite_non_negative(ramp_time)) {
        throw ArgumentError("leader profile ramp_time must be non-negative");
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        if (!finite_positive(s.duration)) {
            throw ArgumentError("segment " + std::to_string(i) + " duration must be positive");
        }
        if (!finite_non_negative(s.target_v)) {
            throw ArgumentError("segment " + std::to_string(i) + " target_v must be non-negative");
        }
        if (!std::isfinite(s.yaw_rate)) {
            throw ArgumentError("segment " + std::to_string(i) + " yaw_rate must be finite");
        }
        if (i > 0 && ramp_time > s.duration) {
            throw ArgumentError("ramp_time exceeds the duration of segment " + std::to_string(i));
        }
    }
}

double LeaderProfile::total_duration() const
{
    double t = 0.0;
    for (const auto& s : segments) {
        t += s.duration;
    }
    return t;
}

ProfileSample leader_profile_eval(const LeaderProfile& profile, double t)
{
    if (profile.segments.empty()) {
        throw ArgumentError("leader profile has no segments");
    }
    if (!(t >= 0.0)) {
        throw ArgumentError("profile time must be non-negative");
    }
    const auto starts = segment_starts(profile);
    const std::size_t k = segment_index(starts, t);
    const auto& seg = profile.segments[k];
    double v = seg.target_v;
    const double since = t - starts[k];
    if (k > 0 && profile.ramp_time > 0.0 && since < profile.ramp_time) {
        const double v_prev = profile.segments[k - 1].target_v;
        v = v_prev + (seg.target_v - v_prev) * (since / profile.ramp_time);
    }
    return {v, seg.yaw_rate};
}

std::vector<ConstantInterval> constant_intervals(const LeaderProfile& profile, double horizon)
{
    profile.validate();
    const auto starts = segment_starts(profile);
    std::vector<ConstantInterval> out;
    for (std::size_t k = 0; k < profile.segments.size(); ++k) {
        const auto& seg = profile.segments[k];
        double start = starts[k];
        if (k > 0) {
            const auto& prev = profile.segments[k - 1];
            if (seg.target_v == prev.target_v && seg.yaw_rate == prev.yaw_rate) {
                continue; // boundary changes nothing; extend the open interval
            }
            if (seg.target_v != prev.target_v) {
                start += profile.ramp_time;
            }
            out.back().end = starts[k];
        }
        out.push_back({start, std::numeric_limits<double>::infinity(), seg.target_v, seg.yaw_rate});
    }
    for (auto& c : out) {
        c.end = std::min(c.end, horizon);
    }
    return out;
}

bool profile_steady(const LeaderProfile& profile, double t, double settle_time, double window,
                    double min_speed, double horizon)
{
    for (const auto& c : constant_intervals(profile, horizon)) {
        if (t >= c.start && t <= c.end) {
            return c.v >= min_speed && t - c.start >= settle_time && c.end - t <= window;
        }
    }
    return false;
}

std::optional<metrics::AmplificationWindow> speed_maneuver(const LeaderProfile& profile, double t_from,
                                                           double horizon)
{
    profile.validate();
    const auto starts = segment_starts(profile);
    std::optional<std::size_t> first;
    for (std::size_t k = 1; k < profile.segments.size(); ++k) {
        if (profile.segments[k].target_v == profile.segments[k - 1].target_v) {
            continue;
        }
        if (!first) {
            if (starts[k] >= t_from && starts[k] < horizon) {
                first = k;
            }
            continue;
        }
        return metrics::AmplificationWindow{starts[*first], std::min(starts[k], horizon),
                                            profile.segments[*first - 1].target_v};
    }
    if (!first) {
        return std::nullopt;
    }
    return metrics::AmplificationWindow{starts[*first], horizon, profile.segments[*first - 1].target_v};
}

// --- noise --------------------------------------------------------------------

void NoiseModel::validate() const
{
    if (!finite_non_negative(sigma_pos) || !finite_non_negative(sigma_v) ||
        !finite_non_negative(sigma_heading)) {
        throw ArgumentError("noise sigmas must be non-negative");
    }
}

dynamics::VehicleState apply_noise(const dynamics::VehicleState& state, const NoiseModel& noise,
                                   NoiseRng& rng)
{
    if (!noise.enabled) {
        return state;
    }
    std::normal_distribution<double> unit(0.0, 1.0);
    const double zx = unit(rng);
    const double zy = unit(rng);
    const double zv = unit(rng);
    const double zh = unit(rng);
    dynamics::VehicleState out = state;
    out.pose.x += noise.sigma_pos * zx;
    out.pose.y += noise.sigma_pos * zy;
    out.v = std::max(0.0, out.v + noise.sigma_v * zv);
    out.pose.theta = dynamics::normalize_angle(out.pose.theta + noise.sigma_heading * zh);
    return out;
}

// --- configuration ------------------------------------------------------------

cacc::ControllerConfig VehicleControl::to_controller_config() const
{
    return {cacc::ControllerGains{k_long, k_lat}, cacc::SpacingPolicy{r, h},
            dynamics::VehicleParams{wheelbase}, standstill_v, extended_lookahead};
}

const VehicleControl& ScenarioConfig::control_for(int vehicle_id) const
{
    if (per_vehicle.empty()) {
        return controller;
    }
    return per_vehicle.at(static_cast<std::size_t>(vehicle_id - 1));
}

namespace {

void validate_control(const VehicleControl& c, const std::string& prefix)
{
    require(finite_positive(c.k_long), prefix + ".k_long", "must be > 0");
    require(finite_positive(c.k_lat), prefix + ".k_lat", "must be > 0");
    require(finite_positive(c.r), prefix + ".r", "must be > 0");
    require(finite_non_negative(c.h), prefix + ".h", "must be >= 0");
    require(finite_non_negative(c.standstill_v), prefix + ".standstill_v", "must be >= 0");
    require(finite_positive(c.wheelbase), prefix + ".wheelbase", "must be > 0");
}

} // namespace

void ScenarioConfig::validate() const
{
    require(n_vehicles >= 2, "n_vehicles", "n_vehicles >= 2 required");
    require(finite_positive(dt), "dt", "must be > 0");
    const double dt_us = dt * 1e6;
    require(std::abs(dt_us - std::round(dt_us)) < 1e-6, "dt",
            "must be a whole number of microseconds");
    require(finite_positive(duration), "duration", "must be > 0");

    const auto& ch = channel_model;
    require(finite_non_negative(ch.delay_min), "channel_model.delay_min", "must be >= 0");
    require(std::isfinite(ch.delay_max) && ch.delay_max >= ch.delay_min, "channel_model.delay_max",
            "must be >= delay_min");
    require(ch.loss_prob >= 0.0 && ch.loss_prob <= 1.0, "channel_model.loss_prob",
            "must lie in [0, 1]");

    const auto& cam = cam_service;
    require(finite_positive(cam.t_gen_min), "cam_service.t_gen_min", "must be > 0");
    require(std::isfinite(cam.t_gen_max) && cam.t_gen_max >= cam.t_gen_min,
            "cam_service.t_gen_max", "must be >= t_gen_min");
    require(finite_non_negative(cam.d_pos_thresh), "cam_service.d_pos_thresh", "must be >= 0");
    require(finite_non_negative(cam.d_speed_thresh), "cam_service.d_speed_thresh", "must be >= 0");
    require(finite_non_negative(cam.d_heading_thresh), "cam_service.d_heading_thresh_deg",
            "must be >= 0");

    if (per_vehicle.empty()) {
        validate_control(controller, "controller");
    } else {
        require(static_cast<int>(per_vehicle.size()) == n_vehicles, "controller",
                "per-vehicle list must have n_vehicles entries");
        for (std::size_t i = 0; i < per_vehicle.size(); ++i) {
            validate_control(per_vehicle[i], "controller[" + std::to_string(i) + "]");
        }
    }

    require(!leader_profile.segments.empty(), "leader_profile.segments", "must not be empty");
    require(finite_non_negative(leader_profile.ramp_time), "leader_profile.ramp_time",
            "must be >= 0");
    for (std::size_t i = 0; i < leader_profile.segments.size(); ++i) {
        const auto& s = leader_profile.segments[i];
        const std::string f = "leader_profile.segments[" + std::to_string(i) + "]";
        require(finite_positive(s.duration), f + ".duration", "must be > 0");
        require(finite_non_negative(s.target_v), f + ".target_v", "must be >= 0");
        require(std::isfinite(s.yaw_rate), f + ".yaw_rate", "must be finite");
        require(i == 0 || leader_profile.ramp_time <= s.duration, "leader_profile.ramp_time",
                "must not exceed the duration of segment " + std::to_string(i));
    }

    require(finite_non_negative(noise.sigma_pos), "noise.sigma_pos", "must be >= 0");
    require(finite_non_negative(noise.sigma_v), "noise.sigma_v", "must be >= 0");
    require(finite_non_negative(noise.sigma_heading), "noise.sigma_heading_deg", "must be >= 0");

    if (initial_spacing) {
        require(finite_positive(*initial_spacing), "initial_spacing", "must be > 0");
    }
    require(metrics.transient_fraction >= 0.0 && metrics.transient_fraction < 1.0,
            "metrics.transient_fraction", "must lie in [0, 1)");
    require(finite_non_negative(metrics.settle_time), "metrics.settle_time", "must be >= 0");
    require(finite_positive(metrics.steady_window), "metrics.steady_window", "must be > 0");
}

ScenarioConfig theoretical_config()
{
    ScenarioConfig cfg;
    cfg.preset = Preset::Theoretical;
    cfg.n_vehicles = 4;
    cfg.dt = 0.01;
    cfg.duration = 120.0;
    cfg.plant = dynamics::PlantModel::Unicycle;
    cfg.channel = cosim::ChannelKind::Ideal;
    cfg.controller = VehicleControl{3.5, 3.5, 1.0, 0.2, 0.05, 0.32, true};
    cfg.noise.enabled = false;
    // accelerate, S-curve, slow down, stop
    cfg.leader_profile.ramp_time = 3.0;
    cfg.leader_profile.segments = {
        {5.0, 0.0, 0.0}, {35.0, 3.0, 0.0},  {5.0, 3.0, 0.2},
        {5.0, 3.0, -0.2}, {45.0, 3.0, 0.0}, {25.0, 0.0, 0.0},
    };
    return cfg;
}

ScenarioConfig realistic_config()
{
    ScenarioConfig cfg = theoretical_config();
    cfg.preset = Preset::Realistic;
    cfg.plant = dynamics::PlantModel::Bicycle;
    cfg.channel = cosim::ChannelKind::Itsg5;
    cfg.controller = VehicleControl{1.0, 1.0, 1.0, 1.0, 0.05, 0.32, true};
    cfg.noise = NoiseModel{true, 0.02, 0.02, 0.5 * kDeg};
    cfg.leader_profile.ramp_time = 1.0;
    cfg.leader_profile.segments = {
        {5.0, 0.0, 0.0}, {35.0, 1.0, 0.0},  {5.0, 1.0, 0.2},
        {5.0, 1.0, -0.2}, {45.0, 1.0, 0.0}, {25.0, 0.0, 0.0},
    };
    return cfg;
}

ScenarioConfig preset_config(Preset preset)
{
    return preset == Preset::Theoretical ? theoretical_config() : realistic_config();
}

const char* to_string(Preset preset)
{
    return preset == Preset::Theoretical ? "theoretical" : "realistic";
}

// --- running ------------------------------------------------------------------

ScenarioResult run_scenario(const ScenarioConfig& cfg)
{
    cfg.validate();

    std::vector<cosim::VehicleSlot> vehicles;
    double x = 0.0;
    for (int id = 1; id <= cfg.n_vehicles; ++id) {
        const VehicleControl& control = cfg.control_for(id);
        if (id > 1) {
            x -= cfg.initial_spacing.value_or(control.r);
        }
        cosim::VehicleSlot slot;
        slot.id = id;
        slot.truth.pose = {x, 0.0, 0.0};
        slot.controller = control.to_controller_config();
        vehicles.push_back(slot);
    }

    cosim::WorldConfig wc;
    wc.dt_us = cosim::to_micros(cfg.dt);
    wc.plant = cfg.plant;
    wc.channel = cfg.channel;
    wc.channel_model = cfg.channel_model;
    wc.channel_model.rng_seed = cfg.seed ^ (cfg.channel_model.rng_seed * 0x9E3779B97F4A7C15ull);
    wc.cam_service = cfg.cam_service;

    const LeaderProfile profile = cfg.leader_profile;
    auto leader_input = [profile](double t) {
        const ProfileSample s = leader_profile_eval(profile, t);
        return std::pair{s.v, s.omega};
    };

    std::vector<NoiseRng> noise_rngs;
    for (int id = 1; id <= cfg.n_vehicles; ++id) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                          static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(id), 0x6e6f6973u};
        noise_rngs.emplace_back(seq);
    }
    const NoiseModel noise = cfg.noise;
    auto reporter = [&noise_rngs, noise](int id, const dynamics::VehicleState& s) {
        return apply_noise(s, noise, noise_rngs[static_cast<std::size_t>(id - 1)]);
    };

    cosim::World world(wc, std::move(vehicles), leader_input, reporter);
    world.run_until(cfg.duration);

    ScenarioResult result;
    result.config = cfg;
    result.steps = world.clock().step_count();
    result.trace = world.trace();
    result.cam_log = world.cam_log();
    result.received = world.received();
    result.events = world.event_trace();
    result.stats = world.stats();

    metrics::MetricsOptions opts;
    opts.duration = cfg.duration;
    opts.transient_fraction = cfg.metrics.transient_fraction;
    const auto intervals = constant_intervals(profile, cfg.duration);
    const double settle = cfg.metrics.settle_time;
    const double window = cfg.metrics.steady_window;
    const double min_speed = std::max(cfg.control_for(2).standstill_v, 1e-9);
    opts.steady = [intervals, settle, window, min_speed](double t) {
        for (const auto& c : intervals) {
            if (t >= c.start && t <= c.end) {
                return c.v >= min_speed && t - c.start >= settle && c.end - t <= window;
            }
        }
        return false;
    };
    opts.amplification = speed_maneuver(profile, opts.transient_fraction * cfg.duration, cfg.duration);
    result.metrics = metrics::compute_metrics(result.trace, cfg.n_vehicles, result.stats, opts);
    return result;
}

std::vector<ReceivedSignalRow> received_signal_rows(const ScenarioResult& result)
{
    std::vector<ReceivedSignalRow> rows;
    rows.reserve(result.received.size());
    for (const auto& s : result.received) {
        rows.push_back({s.t, s.true_v, s.received_v, result.config.channel});
    }
    return rows;
}

ChannelComparison compare_channels(const ScenarioConfig& cfg, int threads)
{
    std::vector<ScenarioConfig> configs(2, cfg);
    configs[0].channel = cosim::ChannelKind::Ideal;
    configs[1].channel = cosim::ChannelKind::Itsg5;
    auto results = sweep::run_sweep(configs, threads);

    ChannelComparison out;
    out.ideal = std::move(results[0]);
    out.itsg5 = std::move(results[1]);
    out.received_signal = received_signal_rows(out.ideal);
    const auto itsg5_rows = received_signal_rows(out.itsg5);
    out.received_signal.insert(out.received_signal.end(), itsg5_rows.begin(), itsg5_rows.end());
    return out;
}

double received_speed_lag(const ScenarioResult& result, double max_lag)
{
    std::vector<metrics::TimedValue> truth{{0.0, 0.0}};
    for (const auto& s : result.received) {
        truth.push_back({s.t, s.true_v});
    }
    std::vector<metrics::TimedValue> received;
    if (result.config.channel == cosim::ChannelKind::Itsg5) {
        for (const auto& row : result.cam_log) {
            if (row.station_id == 1 && row.rx_time) {
                received.push_back({*row.rx_time, comms::speed_from_q(row.speed_q)});
            }
        }
    } else {
        for (const auto& s : result.received) {
            if (s.received_v) {
                received.push_back({s.t, *s.received_v});
            }
        }
    }
    return metrics::estimate_lag(truth, received, max_lag, result.config.dt);
}

} // namespace platoon::scenario
