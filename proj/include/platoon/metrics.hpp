#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "platoon/cacc.hpp"
#include "platoon/cosim.hpp"

namespace platoon::metrics {

struct AmplificationWindow {
    double t0 = 0.0;
    double t1 = 0.0;
    double v_ss = 0.0;
};

struct FollowerMetrics {
    int vehicle_id = 2;
    double mean_abs_e_long = 0.0;
    double max_abs_e_long = 0.0;
    double steady_abs_e_long = 0.0; // max over steady windows
    std::optional<double> amplification_ratio;
    double cross_track_rmse = 0.0;        // against the predecessor's path
    double cross_track_rmse_leader = 0.0; // against vehicle 1's path
};

struct ChannelStats {
    double mean_delay = 0.0;
    std::int64_t generated = 0;
    std::int64_t delivery_count = 0;
    std::int64_t drop_count = 0;
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;
    double mean_inter_arrival = 0.0;
};

struct MetricsReport {
    std::vector<FollowerMetrics> followers;
    ChannelStats channel;
    std::optional<AmplificationWindow> amplification_window;
};

/// Per-vehicle time series extracted from interleaved trace rows.
std::vector<std::vector<cosim::TraceRow>> split_by_vehicle(std::span<const cosim::TraceRow> trace,
                                                           int n_vehicles);

/// A_i = max|v_i - v_ss| / max|v_{i-1} - v_ss| over t in [t0, t1], for i >= 2.
/// Element k of the result belongs to vehicle k + 2.
std::vector<double> amplification_ratio(std::span<const cosim::TraceRow> trace, int n_vehicles,
                                        double t0, double t1, double v_ss);

/// RMS distance of each follower sample to the piecewise-linear leader path.
/// OpenMP-parallel over samples; the sum is taken serially so results are
/// bit-identical to cross_track_rmse_serial.
double cross_track_rmse(std::span<const cacc::Vec2> leader_path,
                        std::span<const cacc::Vec2> follower_samples);

/// Single-threaded reference for cross_track_rmse.
double cross_track_rmse_serial(std::span<const cacc::Vec2> leader_path,
                               std::span<const cacc::Vec2> follower_samples);

/// Distance from p to the segment [a, b].
double point_segment_distance(cacc::Vec2 p, cacc::Vec2 a, cacc::Vec2 b);

struct TimedValue {
    double t = 0.0;
    double value = 0.0;
};

/// Lag tau in [0, max_lag] (grid `step`) maximizing the Pearson correlation
/// between received samples r_k and the true signal evaluated at t_k - tau.
/// `truth` must be sorted by time; it is linearly interpolated.
double estimate_lag(std::span<const TimedValue> truth, std::span<const TimedValue> received,
                    double max_lag, double step);

struct MetricsOptions {
    double duration = 0.0;
    double transient_fraction = 0.1;
    /// True where the leader input has been constant (and moving) long enough
    /// for the platoon to settle.
    std::function<bool(double)> steady;
    /// Window and pre-maneuver speed for the amplification ratio; nullopt skips it.
    std::optional<AmplificationWindow> amplification;
};

MetricsReport compute_metrics(std::span<const cosim::TraceRow> trace, int n_vehicles,
                              const cosim::MessageStats& stats, const MetricsOptions& options);

} // namespace platoon::metrics
