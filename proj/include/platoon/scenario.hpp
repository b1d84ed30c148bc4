#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "platoon/cacc.hpp"
#include "platoon/cosim.hpp"
#include "platoon/itsg5.hpp"
#include "platoon/metrics.hpp"
#include "platoon/vehicle_dynamics.hpp"

namespace platoon::scenario {

struct LeaderSegment {
    double duration = 1.0; // [s]
    double target_v = 0.0; // [m/s]
    double yaw_rate = 0.0; // [rad/s]
};

/// Piecewise leader input. Speed ramps linearly over ramp_time after each
/// segment boundary; yaw rate switches at the boundary.
struct LeaderProfile {
    std::vector<LeaderSegment> segments;
    double ramp_time = 0.0;

    void validate() const;
    double total_duration() const;
};

struct ProfileSample {
    double v = 0.0;
    double omega = 0.0;
};

ProfileSample leader_profile_eval(const LeaderProfile& profile, double t);

/// Maximal interval [start, end) over which the profile output is constant;
/// start is the end of the ramp that led into it, end is clipped to horizon.
struct ConstantInterval {
    double start = 0.0;
    double end = 0.0;
    double v = 0.0;
    double omega = 0.0;
};

std::vector<ConstantInterval> constant_intervals(const LeaderProfile& profile, double horizon);

/// Steady-state sample: t lies in the final `window` seconds of a constant
/// interval, at least settle_time after it began, with speed >= min_speed.
bool profile_steady(const LeaderProfile& profile, double t, double settle_time, double window,
                    double min_speed, double horizon);

/// First speed change starting at or after t_from: the window runs from the
/// change to the next speed change (or horizon), v_ss is the speed before it.
std::optional<metrics::AmplificationWindow> speed_maneuver(const LeaderProfile& profile, double t_from,
                                                           double horizon);

/// Gaussian perturbation of the reported state.
struct NoiseModel {
    bool enabled = false;
    double sigma_pos = 0.02;                                  // [m]
    double sigma_v = 0.02;                                    // [m/s]
    double sigma_heading = 0.5 * std::numbers::pi / 180.0;  // [rad]

    void validate() const;
};

using NoiseRng = std::mt19937_64;

dynamics::VehicleState apply_noise(const dynamics::VehicleState& state, const NoiseModel& noise,
                                   NoiseRng& rng);

struct VehicleControl {
    double k_long = 3.5;
    double k_lat = 3.5;
    double r = 1.0;
    double h = 0.2;
    double standstill_v = 0.05;
    double wheelbase = 0.32;
    bool extended_lookahead = true;

    cacc::ControllerConfig to_controller_config() const;
};

enum class Preset { Theoretical, Realistic };

struct MetricsSettings {
    double transient_fraction = 0.1;
    double settle_time = 10.0;
    double steady_window = 5.0;
};

struct ScenarioConfig {
    Preset preset = Preset::Theoretical;
    int n_vehicles = 4;
    double dt = 0.01;
    double duration = 120.0;
    dynamics::PlantModel plant = dynamics::PlantModel::Unicycle;
    cosim::ChannelKind channel = cosim::ChannelKind::Ideal;
    comms::ChannelModel channel_model;
    comms::CaServiceConfig cam_service;
    VehicleControl controller;
    /// Optional per-vehicle overrides, index 0 = leader; empty or n_vehicles long.
    std::vector<VehicleControl> per_vehicle;
    LeaderProfile leader_profile;
    NoiseModel noise;
    std::uint64_t seed = 1;
    std::optional<double> initial_spacing;
    MetricsSettings metrics;

    const VehicleControl& control_for(int vehicle_id) const;
    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Gains (3.5, 3.5), r = 1 m, h = 0.2 s, unicycle, ideal channel, no noise, 120 s.
ScenarioConfig theoretical_config();
/// Gains (1.0, 1.0), r = 1 m, h = 1.0 s, bicycle, ITS-G5 channel, noise on, 120 s.
ScenarioConfig realistic_config();
ScenarioConfig preset_config(Preset preset);

const char* to_string(Preset preset);

struct ScenarioResult {
    ScenarioConfig config;
    std::int64_t steps = 0;
    std::vector<cosim::TraceRow> trace;
    std::vector<cosim::CamLogRow> cam_log;
    std::vector<cosim::ReceivedSample> received;
    std::vector<cosim::EventRecord> events;
    cosim::MessageStats stats;
    metrics::MetricsReport metrics;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

struct ReceivedSignalRow {
    double t = 0.0;
    double true_v = 0.0;
    std::optional<double> received_v;
    cosim::ChannelKind channel = cosim::ChannelKind::Ideal;
};

struct ChannelComparison {
    ScenarioResult ideal;
    ScenarioResult itsg5;
    std::vector<ReceivedSignalRow> received_signal; // ideal rows, then itsg5 rows
};

/// Runs `cfg` once per channel with identical seeds; the two runs execute
/// concurrently when more than one thread is allowed.
ChannelComparison compare_channels(const ScenarioConfig& cfg, int threads = 0);

std::vector<ReceivedSignalRow> received_signal_rows(const ScenarioResult& result);

/// Lag of the leader speed received by vehicle 2 relative to the true leader
/// speed, from the CAM samples (itsg5) or the forwarded samples (ideal).
double received_speed_lag(const ScenarioResult& result, double max_lag = 1.0);

} // namespace platoon::scenario
