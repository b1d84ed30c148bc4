#include "platoon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "platoon/errors.hpp"

namespace platoon::metrics {

using cacc::Vec2;

std::vector<std::vector<cosim::TraceRow>> split_by_vehicle(std::span<const cosim::TraceRow> trace,
                                                           int n_vehicles)
{
    std::vector<std::vector<cosim::TraceRow>> out(static_cast<std::size_t>(n_vehicles));
    for (const auto& row : trace) {
        if (row.vehicle_id < 1 || row.vehicle_id > n_vehicles) {
            throw ArgumentError("trace row with vehicle id out of range");
        }
        out[static_cast<std::size_t>(row.vehicle_id - 1)].push_back(row);
    }
    return out;
}

std::vector<double> amplification_ratio(std::span<const cosim::TraceRow> trace, int n_vehicles,
                                        double t0, double t1, double v_ss)
{
    if (!(t0 <= t1)) {
        throw ArgumentError("amplification window is empty");
    }
    const auto per_vehicle = split_by_vehicle(trace, n_vehicles);
    std::vector<double> peak(per_vehicle.size(), 0.0);
    for (std::size_t i = 0; i < per_vehicle.size(); ++i) {
        for (const auto& row : per_vehicle[i]) {
            if (row.t >= t0 && row.t <= t1) {
                peak[i] = std::max(peak[i], std::abs(row.v - v_ss));
            }
        }
    }
    std::vector<double> ratios;
    for (std::size_t i = 1; i < peak.size(); ++i) {
        if (peak[i - 1] == 0.0) {
            throw UndefinedMetricError("vehicle " + std::to_string(i) +
                                       " shows no deviation from v_ss in the window");
        }
        ratios.push_back(peak[i] / peak[i - 1]);
    }
    return ratios;
}

namespace {

double point_segment_distance_sq(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2 ab = b - a;
    const Vec2 ap = p - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    double u = 0.0;
    if (len2 > 0.0) {
        u = std::clamp((ap.x * ab.x + ap.y * ab.y) / len2, 0.0, 1.0);
    }
    const Vec2 d = ap - u * ab;
    return d.x * d.x + d.y * d.y;
}

} // namespace

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
    return std::sqrt(point_segment_distance_sq(p, a, b));
}

namespace {

void check_paths(std::span<const Vec2> leader_path, std::span<const Vec2> follower_samples)
{
    if (follower_samples.empty()) {
        throw ArgumentError("follower path is empty");
    }
    const bool degenerate =
        leader_path.size() < 2 ||
        std::all_of(leader_path.begin(), leader_path.end(),
                    [&](const Vec2& q) { return q == leader_path.front(); });
    if (degenerate) {
        throw ArgumentError("leader path must contain at least two distinct points");
    }
}

double nearest_distance_sq(Vec2 p, std::span<const Vec2> path)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < path.size(); ++j) {
        best = std::min(best, point_segment_distance_sq(p, path[j], path[j + 1]));
    }
    return best;
}

double rms(const std::vector<double>& sq)
{
    double sum = 0.0;
    for (double v : sq) {
        sum += v;
    }
    return std::sqrt(sum / static_cast<double>(sq.size()));
}

} // namespace

double cross_track_rmse_serial(std::span<const Vec2> leader_path, std::span<const Vec2> follower_samples)
{
    check_paths(leader_path, follower_samples);
    std::vector<double> sq(follower_samples.size());
    for (std::size_t i = 0; i < follower_samples.size(); ++i) {
        sq[i] = nearest_distance_sq(follower_samples[i], leader_path);
    }
    return rms(sq);
}

double cross_track_rmse(std::span<const Vec2> leader_path, std::span<const Vec2> follower_samples)
{
    check_paths(leader_path, follower_samples);
    const auto n = static_cast<std::int64_t>(follower_samples.size());
    std::vector<double> sq(follower_samples.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        sq[static_cast<std::size_t>(i)] =
            nearest_distance_sq(follower_samples[static_cast<std::size_t>(i)], leader_path);
    }
    return rms(sq);
}

namespace {

double interpolate(std::span<const TimedValue> s, double t)
{
    if (t <= s.front().t) {
        return s.front().value;
    }
    if (t >= s.back().t) {
        return s.back().value;
    }
    const auto it = std::upper_bound(s.begin(), s.end(), t,
                                     [](double x, const TimedValue& tv) { return x < tv.t; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (t - lo.t) / (hi.t - lo.t);
    return lo.value + w * (hi.value - lo.value);
}

} // namespace

double estimate_lag(std::span<const TimedValue> truth, std::span<const TimedValue> received,
                    double max_lag, double step)
{
    if (truth.size() < 2 || received.size() < 2) {
        throw ArgumentError("lag estimation needs at least two samples of each signal");
    }
    if (!(step > 0.0) || !(max_lag >= 0.0)) {
        throw ArgumentError("lag grid must have positive step and non-negative extent");
    }
    const auto n_lags = static_cast<int>(std::floor(max_lag / step + 1e-9));
    double best_lag = 0.0;
    double best_corr = -std::numeric_limits<double>::infinity();
    std::vector<double> shifted(received.size());
    for (int k = 0; k <= n_lags; ++k) {
        const double tau = k * step;
        for (std::size_t j = 0; j < received.size(); ++j) {
            shifted[j] = interpolate(truth, received[j].t - tau);
        }
        const double n = static_cast<double>(received.size());
        double mr = 0.0, ms = 0.0;
        for (std::size_t j = 0; j < received.size(); ++j) {
            mr += received[j].value;
            ms += shifted[j];
        }
        mr /= n;
        ms /= n;
        double cov = 0.0, vr = 0.0, vs = 0.0;
        for (std::size_t j = 0; j < received.size(); ++j) {
            const double dr = received[j].value - mr;
            const double ds = shifted[j] - ms;
            cov += dr * ds;
            vr += dr * dr;
            vs += ds * ds;
        }
        if (vr == 0.0 || vs == 0.0) {
            continue;
        }
        const double corr = cov / std::sqrt(vr * vs);
        if (corr > best_corr) {
            best_corr = corr;
            best_lag = tau;
        }
    }
    if (!std::isfinite(best_corr)) {
        throw UndefinedMetricError("signals are constant; lag is undefined");
    }
    return best_lag;
}

MetricsReport compute_metrics(std::span<const cosim::TraceRow> trace, int n_vehicles,
                              const cosim::MessageStats& stats, const MetricsOptions& options)
{
    MetricsReport report;
    const auto per_vehicle = split_by_vehicle(trace, n_vehicles);
    const double t_discard = options.transient_fraction * options.duration;

    std::vector<std::vector<Vec2>> paths;
    for (const auto& rows : per_vehicle) {
        auto& path = paths.emplace_back();
        path.reserve(rows.size());
        for (const auto& row : rows) {
            path.push_back({row.x, row.y});
        }
    }
    auto rmse_against = [&](int ref_id, const std::vector<Vec2>& samples) {
        try {
            return samples.empty() ? 0.0 : cross_track_rmse(paths[static_cast<std::size_t>(ref_id - 1)], samples);
        } catch (const ArgumentError&) {
            return 0.0; // reference never moved
        }
    };

    std::vector<double> ratios;
    if (options.amplification) {
        const auto& w = *options.amplification;
        try {
            ratios = amplification_ratio(trace, n_vehicles, w.t0, w.t1, w.v_ss);
        } catch (const UndefinedMetricError&) {
            ratios.clear();
        }
    }

    for (int id = 2; id <= n_vehicles; ++id) {
        const auto& rows = per_vehicle[static_cast<std::size_t>(id - 1)];
        FollowerMetrics fm;
        fm.vehicle_id = id;
        double sum = 0.0;
        std::size_t count = 0;
        std::vector<Vec2> samples;
        for (const auto& row : rows) {
            if (row.t < t_discard || !row.e_long) {
                continue;
            }
            const double e = std::abs(*row.e_long);
            sum += e;
            ++count;
            fm.max_abs_e_long = std::max(fm.max_abs_e_long, e);
            if (options.steady && options.steady(row.t)) {
                fm.steady_abs_e_long = std::max(fm.steady_abs_e_long, e);
            }
            samples.push_back({row.x, row.y});
        }
        fm.mean_abs_e_long = count > 0 ? sum / static_cast<double>(count) : 0.0;
        if (!ratios.empty()) {
            fm.amplification_ratio = ratios[static_cast<std::size_t>(id - 2)];
        }
        fm.cross_track_rmse = rmse_against(id - 1, samples);
        fm.cross_track_rmse_leader = rmse_against(1, samples);
        report.followers.push_back(fm);
    }

    report.amplification_window = options.amplification;
    auto& ch = report.channel;
    ch.generated = stats.generated;
    ch.delivery_count = stats.delivered;
    ch.drop_count = stats.dropped;
    ch.accepted = stats.accepted;
    ch.rejected = stats.rejected;
    ch.mean_delay = stats.delivered > 0 ? stats.delay_sum / static_cast<double>(stats.delivered) : 0.0;
    ch.mean_inter_arrival = stats.inter_arrival_count > 0
                                ? stats.inter_arrival_sum / static_cast<double>(stats.inter_arrival_count)
                                : 0.0;
    return report;
}

} // namespace platoon::metrics
